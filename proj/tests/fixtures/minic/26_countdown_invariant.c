// expect: TRUE
int main() {
  int n = __VERIFIER_nondet_int();
  assume(0 <= n && n <= 30);
  int up = 0;
  int down = n;
  while (down > 0) {
    INVARIANT_MARKER_1();
    up++;
    --down;
  }
  assert(up == n);
  return 0;
}
