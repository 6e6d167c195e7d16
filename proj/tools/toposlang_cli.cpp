#include "toposlang/cli.hpp"

int main(int argc, char** argv) {
  return toposlang::cli::cli_run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
