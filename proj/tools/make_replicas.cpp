#include <iostream>

#include <CLI11.hpp>

#include "replicas.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic benchmark replicas and their datasets.toml"};
  std::filesystem::path out = "data/replicas";
  app.add_option("--out", out, "Output directory");
  CLI11_PARSE(app, argc, argv);
  ironylab::replicas::write_all(out);
  for (const auto& r : ironylab::replicas::catalog()) std::cout << (out / r.file).string() << "\n";
  return 0;
}
