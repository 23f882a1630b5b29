// Writes the color-name lookup table asset (32768 x 11 little-endian float32).
#include <iostream>

#include "rpcf/features.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <output.bin>\n";
    return 2;
  }
  try {
    rpcf::ColorNameTable::generate().save(argv[1]);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
