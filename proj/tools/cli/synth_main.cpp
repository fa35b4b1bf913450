#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "../synth/synth_corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"echoaudio-synth: write a synthetic spoken-digit corpus with FSDD-style file names"};
  std::string out_dir;
  echoaudio::synth::CorpusSpec spec;
  app.add_option("output_dir", out_dir, "directory to create")->required();
  app.add_option("--speakers", spec.n_speakers, "number of synthetic voices (1..12)")->check(CLI::Range(1, 12));
  app.add_option("--takes", spec.n_takes, "utterances per digit and speaker")->check(CLI::PositiveNumber);
  app.add_option("--digits", spec.digits, "digits to render")->check(CLI::Range(0, 9));
  app.add_option("--seed", spec.seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto n = echoaudio::synth::write_corpus(out_dir, spec);
    std::cerr << "wrote " << n << " clips to " << out_dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
