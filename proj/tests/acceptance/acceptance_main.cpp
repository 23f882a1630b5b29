#include <cstdio>

#include "rpcf/selfcheck/criteria.hpp"

int main() {
  const auto results = rpcf::selfcheck::run_all(rpcf::selfcheck::Options{});
  for (const auto& r : results) std::printf("%s\n", rpcf::selfcheck::format_line(r).c_str());
  return rpcf::selfcheck::all_passed(results) ? 0 : 1;
}
