#include <CLI11.hpp>
#include <iostream>

#include "seprisk/cli/commands.hpp"

using namespace seprisk;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, modalities, cohort, videos, schema;
  std::optional<std::size_t> runs, degree;
  std::string model;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--cohort", f.cohort, "cohort CSV");
  sub->add_option("--schema", f.schema, "schema JSON for the cohort CSV");
  sub->add_option("--videos", f.videos, "SVID video file, one clip per cohort row");
  sub->add_option("--modalities", f.modalities, "comma list of cd, edm, video");
  sub->add_option("--runs", f.runs, "number of independent runs");
  sub->add_option("--degree", f.degree, "polynomial degree");
}

// Command-line flags override the config file.
cli::RunConfig resolve(const Flags& f) {
  cli::RunConfig c = f.config.empty() ? cli::RunConfig{} : cli::load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (f.cohort) c.cohort = *f.cohort;
  if (f.schema) c.schema = *f.schema;
  if (f.videos) c.videos = *f.videos;
  if (f.modalities) c.modalities = cli::parse_modalities(*f.modalities);
  if (f.runs) c.runs = *f.runs;
  if (f.degree) c.degree = *f.degree;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separable multimodal risk models: preprocessing, training, interpretation"};
  app.require_subcommand(1);
  Flags f;
  auto* prep = app.add_subcommand("prep", "clean, interpolate, impute and write a prepared cohort");
  auto* synth = app.add_subcommand("synth", "generate a synthetic cohort (and optional videos)");
  auto* train = app.add_subcommand("train", "train all model configurations over repeated splits");
  auto* interp = app.add_subcommand("interpret", "rank features and export risk curves from trained models");
  auto* self = app.add_subcommand("selftest", "run built-in numerical checks");
  for (auto* s : {prep, synth, train, interp, self}) add_common(s, f);
  self->add_option("--model", f.model, "also load and validate this model file");
  CLI11_PARSE(app, argc, argv);

  try {
    const cli::RunConfig cfg = resolve(f);
    if (prep->parsed()) cli::cmd_prep(cfg, std::cout);
    if (synth->parsed()) cli::cmd_synth(cfg, std::cout);
    if (train->parsed()) cli::cmd_train(cfg, std::cout);
    if (interp->parsed()) cli::cmd_interpret(cfg, std::cout);
    if (self->parsed() && !cli::cmd_selftest(cfg, f.model, std::cout)) return 2;
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}
