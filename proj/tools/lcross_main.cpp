#include <cstdio>

// Placeholder entry point; subcommand dispatch lands with the experiment
// runners.
int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::fprintf(stderr, "lcross: not wired up yet\n");
  return 2;
}
