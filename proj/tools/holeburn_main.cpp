#include "holeburn/cli.hpp"

int main(int argc, char** argv) {
  return holeburn::cli::dispatch({argv, argv + argc});
}
