#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "waveguide/config.hpp"

using namespace waveguide;

namespace {

const char* kBase = R"([geometry]
d1 = 1
d2 = 2
alpha0 = 0.5

[profile]
kind = rectwell
a = 1.5
alpha1 = -1

[sweep]
axis = lambda
values = 0.04, 0.01, 0.02

[numerics]
n_cells = 200

[run]
tasks = spectrum, asymptotics
out = somewhere
seed = 42
)";

RunConfig parse(const std::string& text) { return load_config(parse_ini(text, "test.ini")); }

// Message of the ConfigError thrown while loading `text`, or "" when it loads.
std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto p = s.find(from);
  EXPECT_NE(p, std::string::npos) << from;
  return s.replace(p, from.size(), to);
}

}  // namespace

TEST(Config, ParsesTheBaseDocument) {
  const RunConfig c = parse(kBase);
  EXPECT_EQ(c.d2, 2.0);
  EXPECT_EQ(c.alpha0, 0.5);
  EXPECT_EQ(c.kind, ProfileKind::RectWell);
  EXPECT_EQ(c.a, 1.5);
  EXPECT_EQ(c.axis, SweepAxis::Lambda);
  EXPECT_EQ(c.sweep_values, (std::vector<double>{0.01, 0.02, 0.04}));
  EXPECT_EQ(c.n_cells, 200u);
  EXPECT_EQ(c.tasks, (std::vector<std::string>{"spectrum", "asymptotics"}));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.out, "somewhere");
}

TEST(Config, CommentsAndBlankLinesAreIgnored) {
  const std::string t = std::string("# leading comment\n; another\n\n") + kBase;
  EXPECT_NO_THROW(parse(t));
}

TEST(Config, ErrorsCarryFileAndLine) {
  EXPECT_EQ(error_of(replace(kBase, "d2 = 2", "d2 = two")),
            "test.ini:3: key 'd2': expected a finite number, got 'two'");
  EXPECT_EQ(error_of(replace(kBase, "a = 1.5", "width = 1.5")), "test.ini:8: unknown key 'width' in [profile]");
  EXPECT_EQ(error_of(replace(kBase, "[numerics]", "[numerix]")), "test.ini:15: unknown section [numerix]");
  EXPECT_EQ(error_of(replace(kBase, "n_cells = 200", "n_cells = 201")), "test.ini:16: n_cells must be even");
  EXPECT_EQ(error_of(replace(kBase, "seed = 42", "seed = -1")),
            "test.ini:21: key 'seed': expected a non-negative integer, got '-1'");
}

TEST(Config, SyntaxErrors) {
  EXPECT_EQ(error_of("[geometry\n"), "test.ini:1: unterminated section header");
  EXPECT_EQ(error_of("d1 = 1\n"), "test.ini:1: key outside of any section");
  EXPECT_EQ(error_of("[geometry]\nd1\n"), "test.ini:2: expected 'key = value'");
  EXPECT_EQ(error_of("[geometry]\nd1 = 1\nd1 = 2\n"), "test.ini:3: duplicate key 'd1'");
  EXPECT_EQ(error_of("[run]\n[run]\n"), "test.ini:2: duplicate section [run]");
}

TEST(Config, SemanticErrors) {
  EXPECT_NE(error_of(replace(kBase, "tasks = spectrum, asymptotics", "tasks = spectrum, nonsense"))
                .find("test.ini:19: unknown task 'nonsense'"),
            std::string::npos);
  EXPECT_EQ(error_of(replace(kBase, "axis = lambda", "axis = a")).find("test.ini:"), 0u);
  EXPECT_NE(error_of(replace(kBase, "values = 0.04, 0.01, 0.02", "values = 0.04, 0.04")).find("duplicate sweep value"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kBase, "axis = lambda", "axis = alpha0")).find("requires sweep axis lambda or sigma"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kBase, "kind = rectwell", "kind = blob")).find("unknown profile kind"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kBase, "d1 = 1", "d1 = -1")).find("must be positive"), std::string::npos);
}

TEST(Config, MissingSections) {
  EXPECT_NE(error_of("[geometry]\nd1 = 1\n").find("missing section [profile]"), std::string::npos);
}

TEST(Config, CanonicalTextRoundTrips) {
  const RunConfig c = parse(kBase);
  const std::string text = to_ini(c);
  const RunConfig d = parse(text);
  EXPECT_EQ(to_ini(d), text);
  EXPECT_EQ(d.sweep_values, c.sweep_values);
  EXPECT_EQ(d.seed, c.seed);
}

TEST(Config, PiecewiseProfile) {
  const std::string t = replace(replace(kBase, "a = 1.5\nalpha1 = -1", "breaks = -1, 0, 1\nvalues = 1, -1"),
                                "kind = rectwell", "kind = piecewise");
  const RunConfig c = parse(t);
  EXPECT_EQ(c.kind, ProfileKind::Piecewise);
  EXPECT_EQ(c.values.size(), 2u);
  EXPECT_NE(error_of(replace(t, "values = 1, -1", "values = 1")).find("one more break"), std::string::npos);
}

TEST(Config, TableFileIsResolvedAgainstTheConfigDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "waveguide_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "t.dat") << "# x delta\n-1 0\n0 -1\n1 0\n";
    std::ofstream(dir / "bad.dat") << "-1 0\n0 oops\n";
  }
  const std::string t =
      replace(replace(kBase, "a = 1.5\nalpha1 = -1", "file = t.dat"), "kind = rectwell", "kind = table");
  const RunConfig c = load_config(parse_ini(t, "test.ini"), dir);
  EXPECT_EQ(c.table_x, (std::vector<double>{-1, 0, 1}));
  EXPECT_EQ(c.table_delta, (std::vector<double>{0, -1, 0}));
  try {
    load_config(parse_ini(replace(t, "t.dat", "bad.dat"), "test.ini"), dir);
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.dat:2:"), std::string::npos) << e.what();
  }
  std::filesystem::remove_all(dir);
}
