#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "clusbird/dataset.hpp"
#include "clusbird/model.hpp"

using namespace clusbird;

namespace {

const std::string kDir = "/tmp/clusbird_cli";

std::string binary() {
  const char* env = std::getenv("CLUSBIRD_BIN");
  REQUIRE(env != nullptr);
  return env;
}

int run(const std::string& args, const std::string& log = "") {
  std::string cmd = binary() + " " + args;
  cmd += " > " + (log.empty() ? kDir + "/last_out.txt" : log) + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void ensure_dir() { std::filesystem::create_directories(kDir); }

// Later cases reuse the simulated sample and a fit of it; regenerate on
// demand so every case stands alone.
void ensure_simulated() {
  ensure_dir();
  if (std::filesystem::exists(kDir + "/sim_data.csv")) return;
  REQUIRE(run("simulate --n 30 --d 6 --k 3 --l 2 --seed 9 --out " + kDir +
              "/sim") == 0);
}

void ensure_fitted() {
  ensure_simulated();
  if (std::filesystem::exists(kDir + "/fit_model.json")) return;
  REQUIRE(run("fit --data " + kDir + "/sim_data.csv --k 3 --l 2 --lambda 0 "
              "--starts 3 --seed 4 --out " + kDir + "/fit") == 0);
}

}  // namespace

TEST_CASE("simulate writes data, labels, and generating parameters") {
  ensure_dir();
  CHECK(run("simulate --n 30 --d 6 --k 3 --l 2 --seed 9 --out " + kDir +
            "/sim") == 0);

  const Dataset data = load_csv(kDir + "/sim_data.csv");
  CHECK(data.n() == 30);
  CHECK(data.d() == 6);

  const std::vector<int> labels = load_labels(kDir + "/sim_labels.txt");
  REQUIRE(labels.size() == 30);
  for (int label : labels) {
    CHECK(label >= 1);
    CHECK(label <= 3);
  }

  const LoadedModel truth = load_model(kDir + "/sim_params.json");
  CHECK(truth.params.k() == 3);
  CHECK(truth.params.l() == 2);
  CHECK(truth.params.d() == 6);
  CHECK(truth.lambda == 0.0);

  SUBCASE("the same seed reproduces the sample byte for byte") {
    CHECK(run("simulate --n 30 --d 6 --k 3 --l 2 --seed 9 --out " + kDir +
              "/sim_again") == 0);
    CHECK(slurp(kDir + "/sim_again_data.csv") == slurp(kDir + "/sim_data.csv"));
    CHECK(slurp(kDir + "/sim_again_labels.txt") ==
          slurp(kDir + "/sim_labels.txt"));
  }
  SUBCASE("invalid designs exit with the validation code") {
    CHECK(run("simulate --n 30 --d 6 --k 3 --l 2 --m 0") == 2);
    CHECK(run("simulate --n 30 --d 6 --k 2 --l 3") == 2);
  }
}

TEST_CASE("fit writes the model, responsibilities, labels, and plot data") {
  ensure_simulated();
  CHECK(run("fit --data " + kDir + "/sim_data.csv --k 3 --l 2 --lambda 0 "
            "--starts 3 --seed 4 --out " + kDir + "/fit") == 0);

  const LoadedModel model = load_model(kDir + "/fit_model.json");
  CHECK(model.params.k() == 3);
  CHECK(model.params.l() == 2);
  CHECK(model.params.d() == 6);
  CHECK(model.lambda == 0.0);

  const std::vector<std::string> resp = lines_of(kDir +
                                                 "/fit_responsibilities.csv");
  REQUIRE(resp.size() == 30);
  {
    std::istringstream row(resp[0]);
    std::string cell;
    double total = 0.0;
    int cells = 0;
    while (std::getline(row, cell, ',')) {
      total += std::stod(cell);
      ++cells;
    }
    CHECK(cells == 3);
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }

  const std::vector<int> labels = load_labels(kDir + "/fit_labels.txt");
  CHECK(labels.size() == 30);

  const std::vector<std::string> plot = lines_of(kDir + "/fit_plotdata.csv");
  REQUIRE(plot.size() == 1 + 3 + 6);  // header, centroids, loadings
  CHECK(plot[0] == "kind,index,dim1,dim2");
  CHECK(plot[1].rfind("centroid,1,", 0) == 0);
  CHECK(plot[4].rfind("loading,1,", 0) == 0);

  SUBCASE("an overwhelming penalty is visible in the saved model") {
    CHECK(run("fit --data " + kDir + "/sim_data.csv --k 3 --l 2 --lambda 1e6 "
              "--starts 2 --seed 4 --out " + kDir + "/fitzero") == 0);
    const LoadedModel zero = load_model(kDir + "/fitzero_model.json");
    CHECK(zero.params.a.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("invalid invocations exit with the validation code") {
    const std::string data = kDir + "/sim_data.csv";
    CHECK(run("fit --data " + data + " --k 2 --l 3 --lambda 0") == 2);
    CHECK(run("fit --data " + data + " --k 3 --l 2") == 2);
    CHECK(run("fit --data " + data +
              " --k 3 --l 2 --lambda 0.1 --auto-lambda") == 2);
  }
  SUBCASE("a missing data file exits with the runtime code") {
    CHECK(run("fit --data " + kDir + "/no_such_file.csv --k 3 --l 2 "
              "--lambda 0") == 1);
  }
}

TEST_CASE("select walks an explicit grid in ascending order") {
  ensure_simulated();
  CHECK(run("select --data " + kDir + "/sim_data.csv --k 3 --l 2 --starts 2 "
            "--seed 3 --grid 0.05,0.01 --out " + kDir + "/sel") == 0);

  const std::vector<std::string> bic = lines_of(kDir + "/sel_bic.csv");
  REQUIRE(bic.size() == 3);
  CHECK(bic[0] == "lambda,loglik,df,bic,nonzeros");
  // Parse the lambda column rather than matching its decimal image; the
  // writer prints shortest-17-digit doubles, so 0.05 carries extra digits.
  CHECK(std::stod(bic[1]) == 0.01);  // sorted ascending before running
  CHECK(std::stod(bic[2]) == 0.05);

  const LoadedModel model = load_model(kDir + "/sel_model.json");
  CHECK((model.lambda == 0.01 || model.lambda == 0.05));

  SUBCASE("garbled grids exit with the validation code") {
    CHECK(run("select --data " + kDir + "/sim_data.csv --k 3 --l 2 "
              "--grid abc") == 2);
  }
}

TEST_CASE("scores estimates per-observation coordinates under a model") {
  ensure_fitted();
  CHECK(run("scores --data " + kDir + "/sim_data.csv --model " + kDir +
            "/fit_model.json --out " + kDir + "/scores.csv") == 0);
  const std::vector<std::string> rows = lines_of(kDir + "/scores.csv");
  REQUIRE(rows.size() == 30);
  {
    std::istringstream row(rows[0]);
    std::string cell;
    int cells = 0;
    while (std::getline(row, cell, ',')) ++cells;
    CHECK(cells == 2);
  }

  SUBCASE("labels can be appended as a last column") {
    CHECK(run("scores --data " + kDir + "/sim_data.csv --model " + kDir +
              "/fit_model.json --with-labels --out " + kDir +
              "/scores_labeled.csv") == 0);
    const std::vector<std::string> labeled =
        lines_of(kDir + "/scores_labeled.csv");
    REQUIRE(labeled.size() == 30);
    const std::size_t last_comma = labeled[0].rfind(',');
    REQUIRE(last_comma != std::string::npos);
    const int label = std::stoi(labeled[0].substr(last_comma + 1));
    CHECK(label >= 1);
    CHECK(label <= 3);
  }
  SUBCASE("an all-zero model warns and still writes scores") {
    CHECK(run("fit --data " + kDir + "/sim_data.csv --k 3 --l 2 --lambda 1e6 "
              "--starts 2 --seed 4 --out " + kDir + "/fitzero") == 0);
    const std::string log = kDir + "/scores_zero_out.txt";
    CHECK(run("scores --data " + kDir + "/sim_data.csv --model " + kDir +
              "/fitzero_model.json --out " + kDir + "/scores_zero.csv",
              log) == 0);
    CHECK(slurp(log).find("warning: all loadings are zero") !=
          std::string::npos);
    CHECK(lines_of(kDir + "/scores_zero.csv").size() == 30);
  }
  SUBCASE("a dimension mismatch exits with the validation code") {
    CHECK(run("simulate --n 20 --d 5 --k 3 --l 2 --seed 1 --out " + kDir +
              "/sim5") == 0);
    CHECK(run("scores --data " + kDir + "/sim5_data.csv --model " + kDir +
              "/fit_model.json --out " + kDir + "/scores_bad.csv") == 2);
  }
  SUBCASE("a missing model file exits with the runtime code") {
    CHECK(run("scores --data " + kDir + "/sim_data.csv --model " + kDir +
              "/no_model.json --out " + kDir + "/scores_bad.csv") == 1);
  }
}

TEST_CASE("eval prints the adjusted Rand index of two label files") {
  ensure_dir();
  {
    std::ofstream a(kDir + "/eval_a.txt");
    a << "1\n1\n2\n2\n";
    std::ofstream b(kDir + "/eval_b.txt");
    b << "1\n2\n1\n2\n";
    std::ofstream c(kDir + "/eval_c.txt");
    c << "5\n5\n9\n9\n";
    std::ofstream d(kDir + "/eval_short.txt");
    d << "1\n2\n";
  }

  const std::string log = kDir + "/eval_out.txt";
  CHECK(run("eval --labels-a " + kDir + "/eval_a.txt --labels-b " + kDir +
            "/eval_b.txt", log) == 0);
  CHECK(slurp(log) == "-0.500000\n");

  CHECK(run("eval --labels-a " + kDir + "/eval_a.txt --labels-b " + kDir +
            "/eval_c.txt", log) == 0);
  CHECK(slurp(log) == "1.000000\n");

  CHECK(run("eval --labels-a " + kDir + "/eval_a.txt --labels-b " + kDir +
            "/eval_short.txt") == 2);
}

TEST_CASE("bench runs a micro grid end to end") {
  ensure_dir();
  CHECK(run("bench --n-list 40 --d-list 6 --m-list 1.0 --reps 1 --starts 2 "
            "--k 3 --l 2 --grid-size 3 --seed 2 --out " + kDir +
            "/results.csv --summary " + kDir + "/summary.csv") == 0);

  const std::vector<std::string> results = lines_of(kDir + "/results.csv");
  REQUIRE(results.size() == 2);
  CHECK(results[0] == "n,d,m,replication,ari,nonzeros,lambda,seconds");
  CHECK(results[1].rfind("40,6,1,1,", 0) == 0);

  const std::vector<std::string> summary = lines_of(kDir + "/summary.csv");
  REQUIRE(summary.size() == 2);
  CHECK(summary[0] == "n,d,m,min,q1,median,q3,max");
  CHECK(summary[1].rfind("40,6,1,", 0) == 0);
}

TEST_CASE("bad invocations exit with the usage code") {
  ensure_dir();
  CHECK(run("") == 2);                       // a subcommand is required
  CHECK(run("frobnicate") == 2);             // unknown subcommand
  CHECK(run("simulate --no-such-flag") == 2);
  CHECK(run("--help") == 0);
}
