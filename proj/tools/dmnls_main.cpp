#include <string>
#include <vector>

#include "dmnls/cli.hpp"

int main(int argc, char** argv) {
  return dmnls::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
