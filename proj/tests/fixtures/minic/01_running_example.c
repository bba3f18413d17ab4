// expect: TRUE
int main() {
  int x = 0;
  int y = 100;
  assume(x == 0 && y == 100);
  while (y > 0) {
    INVARIANT_MARKER_1();
    x += 3;
    y -= 5;
  }
  assert(x > y);
  return 0;
}
