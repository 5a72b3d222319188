#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "scsnet/cli/synthetic.hpp"

// Writes the synthetic scene used by the end-to-end tests:
//   make_fixture <dir> [seed]  ->  <dir>/synthetic.hsic, <dir>/synthetic.hsig
int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: make_fixture <dir> [seed]\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  const std::uint64_t seed = argc == 3 ? std::strtoull(argv[2], nullptr, 10) : 20240611;
  try {
    std::filesystem::create_directories(dir);
    const auto scene = scsnet::cli::synthetic_scene(seed);
    scsnet::save_cube(dir / "synthetic.hsic", scene.cube);
    scsnet::save_labels(dir / "synthetic.hsig", scene.labels);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
