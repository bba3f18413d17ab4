// expect: TRUE
int main() {
  int a = __VERIFIER_nondet_int();
  int b = __VERIFIER_nondet_int();
  assume(0 <= a && a <= 6 && 0 <= b && b <= 6);
  int p = 0;
  int i = 0;
  while (i < a) {
    INVARIANT_MARKER_1();
    int j = 0;
    while (j < b) {
      INVARIANT_MARKER_2();
      p = p + 1;
      j = j + 1;
    }
    i = i + 1;
  }
  assert(p == a * b);
  return 0;
}
