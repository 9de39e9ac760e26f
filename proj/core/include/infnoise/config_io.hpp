#pragma once

#include <string>

#include "infnoise/experiment.hpp"
#include "infnoise/sampling.hpp"

namespace infnoise {

// JSON configuration parsing. Unknown keys anywhere are errors (fail fast);
// the schema is documented in the README.
ExperimentConfig parse_experiment_config(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

// Dataset files for the `spectra` subcommand: either sampled from model
// specs ({"signal":..,"noise":..,"radii":..,"kernel":..,"n":..,"seed":..})
// or raw arrays ({"Y":..,"Z":..,"R":..,"nu":..,"kernel":..}, X optional and
// validated when present).
struct SpectraInput {
  DataSet dataset;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
};
SpectraInput parse_dataset_file(const std::string& text);

KernelSpec parse_kernel_json(const std::string& text);
std::string kernel_to_json(const KernelSpec& k);

}  // namespace infnoise
