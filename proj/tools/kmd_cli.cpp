#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kmd/script.hpp"

namespace {

bool slurp(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic forms and Kato-Milne cohomology in characteristic 2"};
  std::string script_path, json_path, verify_path, oracle = "on";
  kmd::script::Flags flags;
  app.add_option("--script", script_path, "Script to run")->check(CLI::ExistingFile);
  app.add_option("--json", json_path, "Write the JSON report here (default: stdout)");
  app.add_option("--degree-bound", flags.degree_bound, "Default degree bound for searches")
      ->check(CLI::Range(0, 8));
  app.add_option("--oracle", oracle, "Cross-check verdicts")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--seed", flags.seed, "Seed for random(N) bindings");
  app.add_option("--verify-only", verify_path, "Replay the certificates of a report")->check(CLI::ExistingFile);
  app.add_flag("--print", "Print the canonical form of the script and exit");
  CLI11_PARSE(app, argc, argv);
  flags.oracle = oracle == "on";

  if (script_path.empty() == verify_path.empty()) {
    std::cerr << "exactly one of --script and --verify-only is required\n";
    return 2;
  }
  std::string text;
  if (!slurp(verify_path.empty() ? script_path : verify_path, text)) {
    std::cerr << "cannot read input\n";
    return 2;
  }
  if (app.count("--print")) {
    auto p = kmd::script::parse(text);
    for (const auto& d : p.diagnostics)
      std::cerr << "line " << d.line << ", column " << d.column << ": " << d.message << "\n";
    std::cout << kmd::script::print(p.ast);
    return p.ok() ? 0 : 1;
  }
  const kmd::script::RunOutput out = verify_path.empty() ? kmd::script::run(text, flags) : kmd::script::verify(text);
  if (json_path.empty()) {
    std::cout << out.json << "\n";
  } else {
    std::ofstream f(json_path, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << json_path << "\n";
      return 2;
    }
    f << out.json << "\n";
  }
  return out.errors == 0 ? 0 : 1;
}
