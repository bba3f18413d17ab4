// expect: TRUE
int main() {
  int x = __VERIFIER_nondet_int();
  assume(-5 <= x && x <= 5);
  assert((x / 2) * 2 + x % 2 == x);
  assert(x / 2 * 2 <= x || x < 0);
  return 0;
}
