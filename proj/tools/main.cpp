#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "c0ip/driver.hpp"

int main(int argc, char** argv) {
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    c0ip::RunConfig config = c0ip::parse_config(args);
    if (config.show_help) {
      std::cout << config.help_text;
      return 0;
    }
    return c0ip::run(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
