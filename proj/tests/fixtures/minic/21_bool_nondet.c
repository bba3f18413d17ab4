// expect: FALSE
int main() {
  _Bool b = __VERIFIER_nondet_bool();
  int c = __VERIFIER_nondet_bool();
  int x = 0;
  if (b) x = x + 1;
  if (c) x = x + 2;
  assert(x != 3);
  return 0;
}
