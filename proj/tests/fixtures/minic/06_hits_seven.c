// expect: FALSE
int main() {
  int x = __VERIFIER_nondet_int();
  assume(x >= 0);
  assume(x <= 10);
  assert(x != 7);
  return 0;
}
