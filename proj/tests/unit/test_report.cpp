#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rdlab/errors.hpp"
#include "rdlab/report.hpp"

using namespace rdlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("csv quoting round trip") {
  CsvTable t{{"a", "b", "c"}, {}};
  t.add({"plain", "with,comma", "with \"quote\""});
  t.add({"", "multi\nline", "x"});
  const CsvTable back = parse_csv(t.to_string(), "mem");
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK_THROWS(t.add({"too", "few"}));
}

TEST_CASE("csv errors") {
  CHECK_THROWS_AS(parse_csv("", "x"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n", "x"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n\"open,2\n", "x"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n1x\"y,2\n", "x"), ParseError);
  CHECK(parse_csv("a,b\r\n1,2\r\n", "x").rows.size() == 1);
}

TEST_CASE("bundle write and validate") {
  const fs::path dir = fresh_dir("rdlab_bundle_ok");
  ReportBundle b;
  b.config_hash = "0123456789abcdef";
  b.seed = 5;
  b.entries.push_back({"security-prfm", "security", security_table(sweep_prfm({1, 2}))});
  b.entries.push_back({"dbc", "dbc", dbc_table({1, 16}, {1, 4})});
  write_bundle(b, dir.string());
  const BundleCheck ok = validate_bundle(dir.string());
  CHECK(ok.ok);
  CHECK(ok.problems.empty());
  CHECK(ok.manifest["schema_version"] == kSchemaVersion);
  CHECK(ok.manifest["seed"] == 5);
  CHECK(ok.manifest["sweeps"].size() == 2);
  const CsvTable dbc = parse_csv(
      [&] {
        std::ifstream in(dir / "dbc.csv");
        return std::string(std::istreambuf_iterator<char>(in), {});
      }(),
      "dbc.csv");
  CHECK(dbc.rows.size() == 8);
  fs::remove_all(dir);
}

TEST_CASE("bundle validation finds problems") {
  const fs::path dir = fresh_dir("rdlab_bundle_bad");
  ReportBundle b;
  b.entries.push_back({"storage", "storage",
                       storage_table({Mechanism::Chronus}, {1000, 20}, DeviceGeometry{})});
  write_bundle(b, dir.string());
  {
    std::ofstream out(dir / "storage.csv");
    out << "mechanism,nrh\nChronus,20\n";
  }
  BundleCheck bad = validate_bundle(dir.string());
  CHECK_FALSE(bad.ok);
  fs::remove(dir / "storage.csv");
  bad = validate_bundle(dir.string());
  CHECK_FALSE(bad.ok);
  fs::remove(dir / "manifest.json");
  CHECK_FALSE(validate_bundle(dir.string()).ok);
  {
    std::ofstream out(dir / "manifest.json");
    out << "{\"schema_version\": 99, \"sweeps\": []}";
  }
  CHECK_FALSE(validate_bundle(dir.string()).ok);
  fs::remove_all(dir);
}

TEST_CASE("bundle entries must match their schema") {
  ReportBundle b;
  b.entries.push_back({"x", "security", CsvTable{{"wrong"}, {}}});
  CHECK_THROWS_AS(write_bundle(b, fresh_dir("rdlab_bundle_schema").string()), ConfigError);
  ReportBundle d;
  d.entries.push_back({"x", "dbc", dbc_table({1}, {1})});
  d.entries.push_back({"x", "dbc", dbc_table({1}, {1})});
  CHECK_THROWS_AS(write_bundle(d, fresh_dir("rdlab_bundle_dup").string()), ConfigError);
  CHECK_THROWS_AS(sweep_kind("nope"), ConfigError);
}
