#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "dpsn/log.hpp"

int main(int argc, char** argv) {
  // Filter warnings are expected in several tests; keep the output readable.
  dpsn::log::set_sink([](dpsn::log::Level, const std::string&) {});
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
