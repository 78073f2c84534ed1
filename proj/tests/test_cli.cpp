#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fixpat/json_io.hpp"
#include "support/nullcheck4.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fixpat_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int run(const std::string& args, const fs::path& stdout_file) {
  std::string cmd = std::string(FIXPAT_CLI_PATH) + " " + args + " > " +
                    stdout_file.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_demo_corpus(const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& p : fixpat::testgen::nullcheck4_pairs()) {
    write(dir / (std::string(p.name) + ".before.mj"), p.before_text);
    write(dir / (std::string(p.name) + ".after.mj"), p.after_text);
    json bug{{"file", std::string(p.name) + ".before.mj"},
             {"line", p.line},
             {"variable", p.variable},
             {"category", "null-deref"}};
    write(dir / (std::string(p.name) + ".bug.json"), bug.dump());
  }
}

}  // namespace

TEST_CASE("learn, predict, evaluate, and lint round trip through the CLI") {
  TempDir tmp;
  fs::path corpus = tmp.path / "corpus";
  write_demo_corpus(corpus);
  fs::path patterns = tmp.path / "patterns.json";
  fs::path out = tmp.path / "out.json";

  int rc = run("learn --corpus " + corpus.string() + " --out " +
                   patterns.string(),
               out);
  REQUIRE(rc == 0);
  json learn_summary = json::parse(fixpat::read_file(out.string()));
  CHECK(learn_summary["pairs"] == 4);
  CHECK(learn_summary["concreteEdits"].get<int>() >= 8);
  CHECK(learn_summary["patternsKept"].get<int>() >= 4);
  CHECK(fs::exists(patterns));

  // prediction on the first demo pair reproduces its after file
  fs::path bug = corpus / "listview.bug.json";
  fs::path src = corpus / "listview.before.mj";
  rc = run("predict --patterns " + patterns.string() + " --file " +
               src.string() + " --bug " + bug.string() + " --top 3 --validate",
           out);
  REQUIRE(rc == 0);
  json prediction = json::parse(fixpat::read_file(out.string()));
  REQUIRE(prediction.is_array());
  REQUIRE(!prediction.empty());
  CHECK(prediction[0]["rank"] == 1);
  CHECK(prediction[0]["validated"] == true);
  CHECK(prediction[0]["patch"].get<std::string>().find("if (mListView == null)") !=
        std::string::npos);

  rc = run("evaluate --corpus " + corpus.string() + " --folds 2 --top 2",
           out);
  REQUIRE(rc == 0);
  json eval = json::parse(fixpat::read_file(out.string()));
  CHECK(eval["folds"] == 2);
  CHECK(eval["accuracy"].size() == 2);

  fs::path config = tmp.path / "lint.json";
  write(config, R"({"nullableNames":["mListView"]})");
  rc = run("lint --file " + src.string() + " --config " + config.string(),
           out);
  REQUIRE(rc == 0);
  json reports = json::parse(fixpat::read_file(out.string()));
  REQUIRE(reports.size() == 1);
  CHECK(reports[0]["line"] == 2);
}

TEST_CASE("exit codes distinguish usage, parse, and no-fix failures") {
  TempDir tmp;
  fs::path out = tmp.path / "out.json";

  SUBCASE("missing pair member is a usage error") {
    fs::path corpus = tmp.path / "broken";
    fs::create_directories(corpus);
    write(corpus / "a.before.mj", "void m() {\n}\n");
    CHECK(run("learn --corpus " + corpus.string() + " --out " +
                  (tmp.path / "p.json").string(),
              out) == 1);
  }

  SUBCASE("empty corpus directory is a usage error") {
    fs::path corpus = tmp.path / "empty";
    fs::create_directories(corpus);
    CHECK(run("learn --corpus " + corpus.string() + " --out " +
                  (tmp.path / "p.json").string(),
              out) == 1);
  }

  SUBCASE("unparseable source is a parse error") {
    fs::path corpus = tmp.path / "bad";
    fs::create_directories(corpus);
    write(corpus / "a.before.mj", "void m() { if (;\n");
    write(corpus / "a.after.mj", "void m() {\n}\n");
    write(corpus / "a.bug.json",
          R"({"file":"a.before.mj","line":1,"variable":null,"category":"x"})");
    CHECK(run("learn --corpus " + corpus.string() + " --out " +
                  (tmp.path / "p.json").string(),
              out) == 2);
  }

  SUBCASE("no applicable pattern exits 3 with an empty list") {
    fs::path corpus = tmp.path / "corpus";
    write_demo_corpus(corpus);
    fs::path patterns = tmp.path / "patterns.json";
    REQUIRE(run("learn --corpus " + corpus.string() + " --out " +
                    patterns.string(),
                out) == 0);
    fs::path src = tmp.path / "other.mj";
    // a file none of the learned before parts match (no statements)
    write(src, "");
    fs::path bug = tmp.path / "bug.json";
    write(bug, R"({"file":"other.mj","line":1,"variable":null,"category":"x"})");
    CHECK(run("predict --patterns " + patterns.string() + " --file " +
                  src.string() + " --bug " + bug.string(),
              out) == 3);
    json prediction = json::parse(fixpat::read_file(out.string()));
    CHECK(prediction.is_array());
    CHECK(prediction.empty());
  }

  SUBCASE("evaluate rejects more folds than pairs") {
    fs::path corpus = tmp.path / "corpus";
    write_demo_corpus(corpus);
    CHECK(run("evaluate --corpus " + corpus.string() + " --folds 10", out) ==
          1);
  }

  SUBCASE("folds must be positive") {
    fs::path corpus = tmp.path / "corpus";
    write_demo_corpus(corpus);
    CHECK(run("evaluate --corpus " + corpus.string() + " --folds 0", out) ==
          1);
  }
}
