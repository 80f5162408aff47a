#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);  // trial-level threads own the cores
  doctest::Context context;
  context.applyCommandLine(argc, argv);
  return context.run();
}
