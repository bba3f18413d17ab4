// expect: FALSE
extern void abort(void);
void reach_error() {}
void __VERIFIER_assert(int cond) {
  if (!(cond)) {
  ERROR:
    {
      reach_error();
      abort();
    }
  }
  return;
}
int main() {
  unsigned int n = __VERIFIER_nondet_int();
  assume(n <= 8 && n >= 0);
  unsigned int k = 0;
  for (unsigned int j = 0; j < n; ++j) {
    k = k + 2;
  }
  __VERIFIER_assert(k < 16);
  return 0;
}
