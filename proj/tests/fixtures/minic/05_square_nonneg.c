// expect: TRUE
int main() {
  int x = __VERIFIER_nondet_int();
  assume(0 <= x && x <= 10);
  assert(x * x >= 0);
  return 0;
}
