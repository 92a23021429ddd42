#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "additest/clirun.hpp"
#include "additest/csv.hpp"

using namespace additest;

TEST_SUITE_BEGIN("cli");

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& contents = "") {
    path = std::string("/tmp/additest_") + name;
    if (!contents.empty()) {
      std::ofstream out(path);
      out << contents;
    }
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("ingest a small csv") {
  TempFile f("small.csv", "a,b,y\n1,2.5,3\n4,5.5,6\n7,8.5,9\n");
  const DatasetWithNames table = ingest_csv(f.path);
  CHECK(table.data.n == 3);
  CHECK(table.data.d == 2);
  CHECK(table.response_name == "y");
  CHECK(table.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(table.data.feature(1, 1) == doctest::Approx(5.5));
  CHECK(table.data.response[2] == doctest::Approx(9.0));
}

TEST_CASE("named response column") {
  TempFile f("named.csv", "a,y,b\n1,2,3\n4,5,6\n");
  const DatasetWithNames table = ingest_csv(f.path, "y");
  CHECK(table.response_name == "y");
  CHECK(table.data.d == 2);
  CHECK(table.data.response[1] == doctest::Approx(5.0));
  CHECK(table.data.feature(1, 1) == doctest::Approx(6.0));
}

TEST_CASE("non-numeric cell is reported with coordinates") {
  TempFile f("bad.csv", "a,b\n1,2\n3,NA\n");
  try {
    ingest_csv(f.path);
    FAIL("expected ingestion error");
  } catch (const std::exception& e) {
    const std::string what = e.what();
    CHECK(what.find("NA") != std::string::npos);
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("'b'") != std::string::npos);
  }
}

TEST_CASE("missing file and empty body") {
  CHECK_THROWS(ingest_csv("/tmp/additest_does_not_exist.csv"));
  TempFile headeronly("headeronly.csv", "a,b\n");
  CHECK_THROWS(ingest_csv(headeronly.path));
}

TEST_CASE("csv round trip preserves values exactly") {
  Dataset data;
  data.n = 4;
  data.d = 2;
  data.features = {0.1, 1.0 / 3.0, 2.5e-17, 3.0,
                   123456.789, -0.25, 1e300, -7.125};
  data.response = {1.0, -2.0, 0.3333333333333333, 4.0};
  TempFile f("roundtrip.csv");
  write_csv(f.path, to_table(data, {"x1", "x2"}, "y"));
  const DatasetWithNames back = ingest_csv(f.path, "y");
  REQUIRE(back.data.n == data.n);
  REQUIRE(back.data.d == data.d);
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    CHECK(back.data.features[i] == data.features[i]);
  }
  for (std::size_t i = 0; i < data.response.size(); ++i) {
    CHECK(back.data.response[i] == data.response[i]);
  }
}

TEST_CASE("quoted fields parse") {
  TempFile f("quoted.csv", "\"a\",\"b\"\n\"1\",2\n3,\"4\"\n");
  const CsvTable table = read_csv(f.path);
  CHECK(table.columns == std::vector<std::string>{"a", "b"});
  CHECK(table.value(1, 1) == doctest::Approx(4.0));
}

namespace {

std::string synthetic_csv(std::size_t n, bool interaction, unsigned seed) {
  RngStream rng(seed);
  std::ostringstream out;
  out << "x1,x2,y\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.uniform();
    const double x2 = rng.uniform();
    const double y =
        (interaction ? x1 * x2 : x1 + x2) + 0.05 * rng.normal();
    out << x1 << ',' << x2 << ',' << y << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("grid-preview prints one row per point") {
  TempFile input("preview.csv", synthetic_csv(50, false, 5));
  RunConfig config;
  config.command = "grid-preview";
  config.input_path = input.path;
  config.groups = "x1;x2";
  config.levels = "0.2,0.4,0.6,0.8;0.2,0.4,0.6,0.8";
  std::ostringstream out, err;
  const int status = dispatch(config, out, err);
  CHECK(status == 0);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 17);  // header + 16 grid rows
}

TEST_CASE("test command writes a full report") {
  TempFile input("testcmd.csv", synthetic_csv(150, true, 6));
  TempFile report_file("report.json");
  RunConfig config;
  config.command = "test";
  config.input_path = input.path;
  config.groups = "x1;x2";
  config.levels = "0.25,0.5,0.75;0.25,0.5,0.75";
  config.kind = "total";
  config.k = 25;
  config.n_tilde = 8;
  config.n_mc = 12;
  config.seed = 11;
  config.out_path = report_file.path;
  std::ostringstream out, err;
  const int status = dispatch(config, out, err);
  REQUIRE(status == 0);

  std::ifstream in(report_file.path);
  nlohmann::json envelope = nlohmann::json::parse(in);
  CHECK(envelope["command"] == "test");
  CHECK(envelope["seed"] == 11);
  CHECK(envelope["report"].contains("statistic"));
  CHECK(envelope["report"].contains("p_value"));
  CHECK(envelope["report"]["df"] == 4);  // 9 - (1+2+2)
  CHECK(envelope["config"]["k"] == 25);
  CHECK(envelope.contains("wall_time_s"));
}

TEST_CASE("projected test report carries the full theta list") {
  TempFile input("projcmd.csv", synthetic_csv(200, true, 16));
  RunConfig config;
  config.command = "test";
  config.input_path = input.path;
  config.groups = "x1;x2";
  config.levels = "0.2,0.4,0.6,0.8;0.2,0.4,0.6,0.8";  // total df 9
  config.kind = "total";
  config.k = 30;
  config.n_tilde = 10;
  config.n_mc = 15;
  config.project = true;
  config.r = 3;
  config.num_projections = 20;
  config.seed = 12;
  std::ostringstream out, err;
  REQUIRE(dispatch(config, out, err) == 0);
  nlohmann::json envelope = nlohmann::json::parse(out.str());
  CHECK(envelope["report"]["M"] == 20);
  CHECK(envelope["report"]["r"] == 3);
  CHECK(envelope["report"]["theta"].size() == 20);
  CHECK(envelope["report"].contains("theta_bar"));
  CHECK(envelope["report"].contains("u_alpha"));
}

TEST_CASE("quantile-based groups resolve against the data") {
  TempFile input("quant.csv", synthetic_csv(200, false, 7));
  RunConfig config;
  config.command = "grid-preview";
  config.input_path = input.path;
  config.groups = "x1;x2";
  config.quantiles = "0.2,0.4,0.6,0.8;0.2,0.4,0.6,0.8";
  std::ostringstream out, err;
  REQUIRE(dispatch(config, out, err) == 0);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 17);
}

TEST_CASE("simulate command emits ndjson rows plus a summary") {
  RunConfig config;
  config.command = "simulate";
  config.model = "x1x2";
  config.n_train = 80;
  config.k = 12;
  config.n_tilde = 5;
  config.n_mc = 6;
  config.replications = 3;
  config.seed = 3;
  config.levels = "0.3,0.7";
  std::ostringstream out, err;
  const int status = dispatch(config, out, err);
  REQUIRE(status == 0);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(lines, line)) rows.push_back(nlohmann::json::parse(line));
  REQUIRE(rows.size() == 4);  // 3 replications + summary
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i]["replication"] == i);
    CHECK(rows[i].contains("reject"));
  }
  CHECK(rows[3].contains("summary"));
  CHECK(rows[3]["summary"].contains("rejection_rate"));
  CHECK(rows[3]["summary"].contains("binomial_se"));
}

TEST_CASE("validation failures exit nonzero with machine-readable errors") {
  RunConfig config;
  config.command = "test";
  config.input_path = "/tmp/additest_missing.csv";
  config.groups = "x1;x2";
  config.levels = "0.5;0.5";
  std::ostringstream out, err;
  CHECK(dispatch(config, out, err) == 1);
  nlohmann::json error = nlohmann::json::parse(err.str());
  CHECK(error.contains("error"));

  RunConfig unknown;
  unknown.command = "explode";
  std::ostringstream out2, err2;
  CHECK(dispatch(unknown, out2, err2) == 1);
}

TEST_CASE("unknown group column is named in the error") {
  TempFile input("badgroup.csv", synthetic_csv(20, false, 8));
  RunConfig config;
  config.command = "grid-preview";
  config.input_path = input.path;
  config.groups = "x1;nope";
  config.levels = "0.5;0.5";
  std::ostringstream out, err;
  CHECK(dispatch(config, out, err) == 1);
  CHECK(err.str().find("nope") != std::string::npos);
}

TEST_SUITE_END();
