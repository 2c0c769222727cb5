// Command-line entry point.  All behavior lives in heatlab/cli.hpp; this file
// only owns streams and the exit-code contract: 0 success, 2 invalid request,
// 1 module error (message passed through verbatim), suite failures counted.

#include <fstream>
#include <iostream>
#include <stdexcept>

#include "heatlab/cli.hpp"

int main(int argc, char** argv) {
  heatlab::RunRequest req;
  CLI::App app;
  heatlab::build_cli(app, req);
  try {
    app.parse(argc, argv);
    for (const CLI::App* sub : app.get_subcommands()) req.command = sub->get_name();
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    heatlab::validate_request(req);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (req.out != "-") {
    file.open(req.out);
    if (!file) {
      std::cerr << "usage error: out: cannot open '" << req.out << "' for writing\n";
      return 2;
    }
    out = &file;
  }

  try {
    return heatlab::execute_request(req, *out);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
