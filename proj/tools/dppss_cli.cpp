#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dppss/csv.hpp"
#include "dppss/datasets.hpp"
#include "dppss/experiments.hpp"
#include "dppss/validation.hpp"

namespace {

struct DataOptions {
  std::string dataset = "gmm";
  std::string mnist_images = "train-images-idx3-ubyte";
  std::string mnist_labels = "train-labels-idx1-ubyte";
  std::string data_file;
  long size = 1024;
};

const std::map<std::string, dppss::DesignRule> kDesignRules{
    {"center", dppss::DesignRule::support_center}, {"barycenter", dppss::DesignRule::barycenter}};

std::vector<dppss::SamplerKind> parse_samplers(const std::vector<std::string>& names) {
  std::vector<dppss::SamplerKind> out;
  for (const auto& n : names) out.push_back(dppss::parse_sampler(n));
  return out;
}

void emit(const dppss::CsvTable& table, const std::string& out) {
  if (out.empty() || out == "-") dppss::write_csv(std::cout, table);
  else dppss::write_csv(std::filesystem::path(out), table);
}

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--dataset", o.dataset, "gmm | mnist | csv")
      ->check(CLI::IsMember({"gmm", "mnist", "csv"}));
  cmd->add_option("--mnist-images", o.mnist_images, "IDX image file (searched in $DPPSS_DATA_DIR)");
  cmd->add_option("--mnist-labels", o.mnist_labels, "IDX label file");
  cmd->add_option("--data-file", o.data_file, "CSV dataset, last column = label for pegasos");
  cmd->add_option("--size", o.size, "points to generate or load");
}

dppss::Dataset load_dataset(const DataOptions& o, std::uint64_t seed, bool two_class) {
  if (o.dataset == "mnist") {
    const auto raw = dppss::load_mnist_idx(dppss::resolve_data_path(o.mnist_images),
                                           dppss::resolve_data_path(o.mnist_labels), {4, 9}, o.size);
    return dppss::pca_project(raw, 2);
  }
  if (o.dataset == "csv") {
    if (o.data_file.empty()) throw std::invalid_argument("--dataset csv needs --data-file");
    return dppss::load_csv_dataset(dppss::resolve_data_path(o.data_file), two_class);
  }
  if (two_class) return dppss::gen_two_class_gaussian(o.size / 2, seed);
  return dppss::gen_gmm_trimodal(o.size, seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet and polynomial DPP samplers for quadrature and coresets"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out", out, "output CSV path (default stdout)");

  // quadrature
  auto* quad = app.add_subcommand("quadrature", "variance of quadrature estimators versus n");
  dppss::QuadratureConfig qcfg;
  std::string q_sampler = "haar";
  std::vector<int> scale_j;
  quad->add_option("--sampler", q_sampler, "iid | haar | db2 | ope")->capture_default_str();
  quad->add_option("--dim", qcfg.dim, "1 or 2")->capture_default_str();
  quad->add_option("--fn", qcfg.fn, "gamma | mixcos | bump")->capture_default_str();
  quad->add_option("--gamma", qcfg.fn_params.gamma, "exponent of gamma")->capture_default_str();
  quad->add_option("--weight", qcfg.weight, "one | bump")->capture_default_str();
  quad->add_option("--n-list", qcfg.n_list, "sample sizes")->delimiter(',');
  quad->add_option("--scale-j", scale_j, "wavelet scales; sets n = 2^(d j)")->delimiter(',');
  quad->add_option("--trials", qcfg.trials, "trials per n")->capture_default_str();
  quad->add_option("--design", qcfg.design, "db2 design points: center | barycenter")
      ->transform(CLI::CheckedTransformer(kDesignRules))
      ->default_str("center");

  // coreset-kmeans
  auto* core = app.add_subcommand("coreset-kmeans", "relative error quantile of k-means coresets");
  dppss::CoresetConfig ccfg;
  DataOptions cdata;
  std::vector<std::string> c_samplers{"iid", "haar", "db2", "ope"};
  core->add_option("--sampler", c_samplers, "samplers to compare")->delimiter(',');
  core->add_option("--m-list", ccfg.m_list, "coreset sizes")->delimiter(',');
  core->add_option("--trials", ccfg.replicas, "coreset replicas")->capture_default_str();
  core->add_option("--candidates", ccfg.candidates, "candidate center sets")->capture_default_str();
  core->add_option("--k", ccfg.k, "centers per candidate")->capture_default_str();
  core->add_option("--design", ccfg.design, "db2 design points: center | barycenter")
      ->transform(CLI::CheckedTransformer(kDesignRules))
      ->default_str("barycenter");
  add_data_options(core, cdata);

  // pegasos
  auto* peg = app.add_subcommand("pegasos", "Pegasos learning curves with DPP minibatches");
  dppss::PegasosConfig pcfg;
  DataOptions pdata;
  pdata.dataset = "gmm";
  pdata.size = 1000;
  std::vector<std::string> p_samplers{"iid", "haar", "db2", "ope"};
  peg->add_option("--sampler", p_samplers, "samplers to compare")->delimiter(',');
  peg->add_option("--m-list", pcfg.batch_per_class, "minibatch size per class")->capture_default_str();
  peg->add_option("--iterations", pcfg.iterations, "T")->capture_default_str();
  peg->add_option("--lambda", pcfg.lambda, "regularization")->capture_default_str();
  peg->add_option("--trials", pcfg.trials, "independent runs")->capture_default_str();
  peg->add_option("--design", pcfg.design, "db2 design points: center | barycenter")
      ->transform(CLI::CheckedTransformer(kDesignRules))
      ->default_str("barycenter");
  add_data_options(peg, pdata);

  // validate
  auto* val = app.add_subcommand("validate", "built-in correctness suites");
  std::string suite = "all";
  bool inject_bias = false;
  val->add_option("--suite", suite, "all | oracle | partition | unbiasedness | transfer | slope")
      ->capture_default_str();
  val->add_flag("--inject-bias", inject_bias)->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*quad) {
      qcfg.sampler = dppss::parse_sampler(q_sampler);
      qcfg.seed = seed;
      qcfg.threads = threads;
      if (!scale_j.empty()) {
        qcfg.n_list.clear();
        for (int j : scale_j) qcfg.n_list.push_back(1 << (qcfg.dim * j));
      }
      emit(dppss::quadrature_csv(dppss::run_quadrature_experiment(qcfg)), out);
    } else if (*core) {
      ccfg.samplers = parse_samplers(c_samplers);
      ccfg.seed = seed;
      ccfg.threads = threads;
      const auto data = load_dataset(cdata, seed, false);
      emit(dppss::coreset_csv(dppss::run_coreset_experiment(data, ccfg)), out);
    } else if (*peg) {
      pcfg.samplers = parse_samplers(p_samplers);
      pcfg.seed = seed;
      pcfg.threads = threads;
      const auto data = load_dataset(pdata, seed, true);
      emit(dppss::pegasos_csv(dppss::run_pegasos_experiment(data, pcfg)), out);
    } else if (*val) {
      dppss::ValidationOptions opts;
      opts.inject_bias = inject_bias;
      opts.threads = threads;
      if (app.get_option("--seed")->count()) opts.seed = seed;
      const auto report = dppss::run_validation(suite, opts);
      dppss::print_report(std::cout, report);
      return report.passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
