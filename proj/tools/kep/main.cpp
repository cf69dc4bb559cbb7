#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "common.hpp"
#include "kep/error.hpp"

namespace {

// KEP_LOG_LEVEL: trace, debug, info, warn, error, critical or off.
void setup_logging() {
  auto logger = spdlog::stderr_color_mt("kep");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  logger->set_level(spdlog::level::warn);
  if (const char* level = std::getenv("KEP_LOG_LEVEL"))
    logger->set_level(spdlog::level::from_str(level));
  spdlog::set_default_logger(logger);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Privacy-preserving kidney exchange: secure protocol, oracles and simulation"};
  app.require_subcommand(1);
  kep::cli::add_gen(app);
  kep::cli::add_deal(app);
  kep::cli::add_peer(app);
  kep::cli::add_run_local(app);
  kep::cli::add_reveal(app);
  kep::cli::add_greedy(app);
  kep::cli::add_exact(app);
  kep::cli::add_quality(app);
  kep::cli::add_simulate(app);
  kep::cli::add_plot(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const kep::Error& e) {
    std::cerr << "kep: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "kep: internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
