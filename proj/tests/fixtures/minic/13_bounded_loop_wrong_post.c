// expect: FALSE
int main() {
  int N = __VERIFIER_nondet_int();
  assume(1 <= N && N <= 10);
  int i = 1;
  while (i <= N) {
    i = i + 1;
  }
  assert(i == N);
  return 0;
}
