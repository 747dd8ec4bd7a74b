#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kmd/script.hpp"

using namespace kmd::script;
using json = nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scenarios() { return std::filesystem::path(KMD_SOURCE_DIR) / "scenarios"; }

void strip_times(json& j) {
  if (j.is_object()) {
    j.erase("time_ms");
    for (auto& [k, v] : j.items()) strip_times(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_times(v);
  }
}

// Random statements from the grammar, built as text.
struct Gen {
  std::mt19937_64 rng;
  std::vector<std::string> forms;
  int counter = 0;
  explicit Gen(unsigned long seed) : rng(seed) {}

  std::string pick(const std::vector<std::string>& v) { return v[rng() % v.size()]; }
  std::string elem() { return pick({"t", "x + 1", "t^2/(x + t)", "(t + 1)*x", "1", "0", "g*t + g^2", "t^-1"}); }

  std::string atom(int depth) {
    switch (rng() % (depth > 1 ? 4 : 6)) {
      case 0: return "[" + elem() + ", " + elem() + "]";
      case 1: return "<<" + elem() + ", " + elem() + "]]";
      case 2: return "H";
      case 3: return forms.empty() ? "H" : pick(forms);
      case 4: return "(" + sum(depth + 1) + ")";
      default: return forms.empty() ? "H" : "transfer(" + pick(forms) + ")";
    }
  }
  std::string term(int depth) {
    if (rng() % 3 == 0) return (rng() % 2 ? "t" : "(" + elem() + ")") + std::string(" * ") + atom(depth);
    return atom(depth);
  }
  std::string sum(int depth) {
    std::string s = term(depth);
    for (int i = static_cast<int>(rng() % 3); i > 0; --i) s += " + " + term(depth);
    return s;
  }
  std::string statement() {
    switch (rng() % 6) {
      case 0: {
        std::string n = "f" + std::to_string(counter++);
        std::string s = "form " + n + " = " + sum(0);
        forms.push_back(n);
        return s;
      }
      case 1: return "let y" + std::to_string(counter++) + " = " + elem();
      case 2: return "class c" + std::to_string(counter++) + " = sym(" + elem() + "; " + elem() + ") + clifford(q)";
      case 3: return "quat Q" + std::to_string(counter++) + " = [" + elem() + ", " + elem() + ") over K";
      case 4: return "check witt_trivial " + (forms.empty() ? std::string("q") : pick(forms)) + " with oracle=off, budget=7";
      default: return "check residue q, " + elem() + ", " + elem() + " with kind=Delta";
    }
  }
};

}  // namespace

TEST_CASE("parse: declarations") {
  auto p = parse("field F = GF(2)(t)\next K = F[alpha] where wp(alpha) = t^2\n");
  REQUIRE(p.ok());
  REQUIRE(p.ast.stmts.size() == 2);
  CHECK(p.ast.stmts[0].kind == Stmt::Kind::field);
  CHECK(p.ast.stmts[0].k == 1);
  CHECK(p.ast.stmts[0].vars == std::vector<std::string>{"t"});
  CHECK(p.ast.stmts[1].kind == Stmt::Kind::ext);
  CHECK(p.ast.stmts[1].exprs[0].text == "t^2");
  CHECK(parse("field F = GF(8)(x, t)").ast.stmts[0].k == 3);
  CHECK(parse("field F = GF(2^4)").ast.stmts[0].k == 4);
}

TEST_CASE("parse: diagnostics carry positions and expected tokens") {
  auto p = parse("field F = GF(2)(t)\nform q = [1,");
  REQUIRE(p.diagnostics.size() == 1);
  CHECK(p.diagnostics[0].line == 2);
  CHECK(p.diagnostics[0].column == 12);
  CHECK(p.diagnostics[0].expected == std::vector<std::string>{"element"});

  auto bad = parse("feld F = GF(2)\nfield F = GF(6)\nform q = [1, t] + r\nquat Q = [1, t] over K\ncheck x $");
  REQUIRE(bad.diagnostics.size() == 5);
  CHECK(bad.diagnostics[0].column == 1);
  CHECK(bad.diagnostics[0].expected.size() == 8);
  CHECK(bad.diagnostics[1].column == 14);
  CHECK(bad.diagnostics[2].column == 19);
  CHECK(bad.diagnostics[3].expected == std::vector<std::string>{")"});
  CHECK(bad.diagnostics[4].message.find("unexpected character") != std::string::npos);
}

TEST_CASE("parse, print, parse is stable") {
  for (const auto& entry : std::filesystem::directory_iterator(scenarios())) {
    auto p = parse(read_file(entry.path()));
    REQUIRE(p.ok());
    const std::string once = print(p.ast);
    auto again = parse(once);
    REQUIRE(again.ok());
    CHECK(print(again.ast) == once);
  }
  for (unsigned long seed = 1; seed <= 40; ++seed) {
    Gen g(seed);
    std::string text = "form q = H\n";
    for (int i = 0; i < 12; ++i) text += g.statement() + "\n";
    auto p = parse(text);
    REQUIRE_MESSAGE(p.ok(), text);
    REQUIRE(p.ast.stmts.size() == 13);
    const std::string once = print(p.ast);
    auto again = parse(once);
    REQUIRE(again.ok());
    CHECK(print(again.ast) == once);
  }
}

TEST_CASE("run: results, errors and undecided statements") {
  const std::string text =
      "field F = GF(2)(t)\n"
      "let d = t^2 + t + 1\n"
      "form q = t * [1, d]\n"
      "check residue q, t with kind=delta\n"
      "check residue q, t^2 + t + 1 with kind=delta\n"
      "check witt_trivial nothing\n"
      "let d = 1\n";
  RunOutput out = run(text, Flags{});
  json r = json::parse(out.json);
  CHECK(r["schema"] == 1);
  CHECK(r["seed"] == 1);
  CHECK(out.errors == 2);
  CHECK(r["errors"] == 2);
  const auto& st = r["statements"];
  CHECK(st[3]["result"]["value"] == "[1, 1]");
  CHECK(st[4]["result"].contains("value"));
  CHECK(st[5]["error"] == "unknown form 'nothing'");
  CHECK(st[6]["error"] == "name 'd' is already defined");

  RunOutput un = run("field F = GF(2)(x, t)\nform q = t * [1, x]\ncheck residue q, x*t^2 + t + 1\n", Flags{});
  json u = json::parse(un.json);
  CHECK(un.errors == 0);
  CHECK(u["statements"][2]["result"]["verdict"] == "undecided");
  CHECK(u["statements"][2]["result"]["diagnostics"][0].get<std::string>().find("unsupported") == 0);

  RunOutput diag = run("field F = GF(2)(t)\nform q = [1,\n", Flags{});
  CHECK(diag.errors == 1);
  CHECK(json::parse(diag.json)["diagnostics"][0]["column"] == 12);
}

TEST_CASE("run: descended scenario") {
  RunOutput out = run(read_file(scenarios() / "descended.kmd"), Flags{});
  REQUIRE(out.errors == 0);
  json r = json::parse(out.json);
  const json& last = r["statements"].back()["result"];
  CHECK(last["verdict"] == "descends");
  CHECK(last["certificate"]["lambda"] == "1");
  CHECK(last["reconstruction"]["phi0"]["dim"] == 6);
}

TEST_CASE("run is deterministic up to timing") {
  const std::string text = read_file(scenarios() / "tour.kmd");
  Flags f;
  f.seed = 9;
  json a = json::parse(run(text, f).json), b = json::parse(run(text, f).json);
  strip_times(a);
  strip_times(b);
  CHECK(a.dump() == b.dump());
  f.seed = 10;
  json c = json::parse(run(text, f).json);
  strip_times(c);
  CHECK(c["seed"] == 10);
}

TEST_CASE("verify-only replays certificates") {
  for (const char* name : {"tour.kmd", "descended.kmd"}) {
    RunOutput out = run(read_file(scenarios() / name), Flags{});
    REQUIRE(out.errors == 0);
    RunOutput v = verify(out.json);
    CHECK(v.errors == 0);
    json r = json::parse(v.json);
    CHECK(r["mode"] == "verify");
    CHECK(!r["checks"].empty());
  }
  // A corrupted chain is caught.
  json rep = json::parse(run(read_file(scenarios() / "tour.kmd"), Flags{}).json);
  bool changed = false;
  for (auto& s : rep["statements"])
    if (!changed && s.value("query", "") == "witt_equal") {
      s["result"]["chain"][0]["e"][0] = "t + 1";
      changed = true;
    }
  REQUIRE(changed);
  CHECK(verify(rep.dump()).errors == 1);
  CHECK(verify("not json").errors == 1);
}
