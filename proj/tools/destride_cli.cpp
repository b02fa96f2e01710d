// Command-line driver: rewrite strided networks, verify equivalence, report
// weight sharing, run the bundled property suites.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "destride/errors.hpp"
#include "destride/network.hpp"
#include "destride/report.hpp"
#include "destride/selftest.hpp"
#include "destride/spec_io.hpp"
#include "destride/transform.hpp"
#include "json.hpp"

namespace {

using namespace destride;

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kShape = 3, kIo = 4 };

WeightStorage parse_storage(const std::string& s) {
  if (s == "inline") return WeightStorage::inline_values;
  if (s == "sidecar") return WeightStorage::sidecar;
  return WeightStorage::automatic;
}

std::string cell(const Layer& layer, const LayerShape& shape) {
  return describe(layer) + " -> " + (shape.flat ? std::to_string(shape.shape.channels) : shape_string(shape.shape));
}

void print_shape_table(std::ostream& os, const NetworkSpec& original, const NetworkSpec& rewritten) {
  const auto a = infer_shapes(original);
  const auto b = infer_shapes(rewritten);
  constexpr int w = 34;
  os << std::left << std::setw(8) << "layer" << std::setw(w) << original.name << rewritten.name << '\n';
  os << std::setw(8) << "input" << std::setw(w) << shape_string(original.input_shape)
     << shape_string(rewritten.input_shape) << '\n';
  for (std::size_t i = 0; i < original.layers.size(); ++i) {
    if (kind_of(original.layers[i]) == LayerKind::activation) continue;
    os << std::setw(8) << (i + 1) << std::setw(w) << cell(original.layers[i], a[i])
       << cell(rewritten.layers[i], b[i]) << '\n';
  }
}

bool has_strides(const NetworkSpec& spec) {
  for (const auto& layer : spec.layers)
    if (const auto* c = std::get_if<ConvLayer>(&layer); c && c->stride > 1) return true;
  return false;
}

int cmd_transform(const std::string& input, const std::string& output, std::size_t output_stride,
                  const std::string& storage) {
  const SpecDocument doc = load_spec(input);
  if (doc.transform) std::cerr << "warning: input is itself a rewritten network\n";
  if (!has_strides(doc.network) && output_stride == 1) std::cerr << "warning: nothing to eliminate\n";

  auto result = transform_network(doc.network, {output_stride});
  SpecDocument out;
  out.network = std::move(result.spec);
  out.has_weights = doc.has_weights;
  out.transform = TransformLink{doc.network.name, output_stride, result.input_map, result.flatten};
  save_spec(out, output, parse_storage(storage));

  print_shape_table(std::cout, doc.network, out.network);
  return kOk;
}

int cmd_init(const std::string& input, const std::string& output, std::uint64_t seed, const std::string& storage) {
  SpecDocument doc = load_spec(input);
  doc.network = init_params(doc.network, seed);
  doc.has_weights = true;
  save_spec(doc, output, parse_storage(storage));
  return kOk;
}

// Loads both documents and checks that the second was derived from the first.
std::pair<SpecDocument, SpecDocument> load_pair(const std::string& original_path, const std::string& rewritten_path) {
  SpecDocument original = load_spec(original_path);
  SpecDocument rewritten = load_spec(rewritten_path);
  if (!rewritten.transform) throw SpecError(rewritten_path + " carries no transform metadata");
  if (rewritten.transform->source != original.network.name ||
      rewritten.network.provenance != "transformed-from:" + original.network.name) {
    throw SpecError(rewritten_path + " was not derived from network '" + original.network.name + "'");
  }
  return {std::move(original), std::move(rewritten)};
}

int cmd_verify(const std::string& original_path, const std::string& rewritten_path, std::size_t trials, double tol,
               std::uint64_t seed) {
  const auto [original, rewritten] = load_pair(original_path, rewritten_path);
  const auto report =
      verify_equivalence(original.network, rewritten.network, rewritten.transform->input_map, trials, tol, seed);

  std::cout << "trials       " << report.trials << '\n'
            << "tolerance    " << std::scientific << std::setprecision(3) << report.tolerance << '\n'
            << "max_abs_dev  " << report.max_abs_dev << '\n'
            << "result       " << (report.pass ? "PASS" : "FAIL") << '\n';
  return report.pass ? kOk : kFail;
}

int cmd_report(const std::string& original_path, const std::string& rewritten_path, bool as_json) {
  const auto [original, rewritten] = load_pair(original_path, rewritten_path);
  const auto expected = transform_network(original.network, {rewritten.transform->output_stride});
  if (infer_shapes(expected.spec) != infer_shapes(rewritten.network)) {
    throw ShapeError("rewritten network does not have the structure derived from '" + original.network.name + "'");
  }
  const auto report = parameter_report(original.network, rewritten.network, expected.trace);

  if (as_json) {
    nlohmann::ordered_json j;
    j["original"] = original.network.name;
    j["rewritten"] = rewritten.network.name;
    j["ok"] = report.ok();
    j["layers"] = nlohmann::ordered_json::array();
    for (const auto& l : report.layers) {
      j["layers"].push_back({
          {"layer", l.original_layer},
          {"original", l.original_desc},
          {"rewritten", l.transformed_desc},
          {"outer_stride", l.outer_stride},
          {"original_count", l.original_count},
          {"stored_volume", l.stored_volume},
          {"traced_count", l.traced_count},
          {"padding_zeros", l.padding_zeros},
          {"distinct_sources", l.distinct_sources},
          {"ratio", l.ratio},
          {"sharing_ok", l.sharing_ok},
          {"values_match", l.values_match},
      });
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << std::left << std::setw(6) << "layer" << std::setw(22) << "original" << std::setw(22) << "rewritten"
              << std::right << std::setw(10) << "params" << std::setw(10) << "stored" << std::setw(10) << "traced"
              << std::setw(10) << "padding" << std::setw(10) << "distinct" << std::setw(8) << "ratio"
              << "  sharing\n";
    for (const auto& l : report.layers) {
      std::cout << std::left << std::setw(6) << l.original_layer << std::setw(22) << l.original_desc << std::setw(22)
                << l.transformed_desc << std::right << std::setw(10) << l.original_count << std::setw(10)
                << l.stored_volume << std::setw(10) << l.traced_count << std::setw(10) << l.padding_zeros
                << std::setw(10) << l.distinct_sources << std::setw(8) << std::fixed << std::setprecision(2)
                << l.ratio << "  " << (l.sharing_ok && l.values_match ? "ok" : "MISMATCH") << '\n';
    }
  }
  return report.ok() ? kOk : kFail;
}

int cmd_selftest(std::uint64_t seed, const std::optional<std::string>& property) {
  const auto results = run_selftest(seed, property);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    std::cout << std::left << std::setw(18) << r.name << (r.pass ? "PASS" : "FAIL") << "  cases=" << r.cases
              << "  max_dev=" << std::scientific << std::setprecision(3) << r.max_dev;
    if (!r.detail.empty()) std::cout << "  " << r.detail;
    std::cout << '\n';
  }
  return all ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rewrite strided all-convolutional networks into stride-1 equivalents"};
  app.require_subcommand(1);

  std::string input, output, storage = "auto";
  std::size_t output_stride = 1;
  auto* transform = app.add_subcommand("transform", "Rewrite a network so every convolution has stride 1");
  transform->add_option("input", input, "Network document")->required();
  transform->add_option("output", output, "Where to write the rewritten network")->required();
  transform->add_option("--output-stride", output_stride, "Also rearrange the final feature map with this stride")
      ->check(CLI::PositiveNumber);
  transform->add_option("--weights", storage, "Weight storage: auto, inline or sidecar")
      ->check(CLI::IsMember({"auto", "inline", "sidecar"}));

  std::uint64_t seed = 0;
  auto* init = app.add_subcommand("init", "Fill a network's weights from a seeded uniform(-1, 1) generator");
  init->add_option("input", input, "Network document")->required();
  init->add_option("output", output, "Where to write the initialised network")->required();
  init->add_option("--seed", seed, "Generator seed");
  init->add_option("--weights", storage, "Weight storage: auto, inline or sidecar")
      ->check(CLI::IsMember({"auto", "inline", "sidecar"}));

  std::string original, rewritten;
  std::size_t trials = 100;
  double tol = 1e-9;
  auto* verify = app.add_subcommand("verify", "Compare forward passes of a network and its rewrite");
  verify->add_option("original", original, "Original network document")->required();
  verify->add_option("transformed", rewritten, "Rewritten network document")->required();
  verify->add_option("--trials", trials, "Number of random inputs")->check(CLI::PositiveNumber);
  verify->add_option("--tol", tol, "Maximum allowed absolute deviation")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", seed, "Input generator seed");

  bool as_json = false;
  auto* report = app.add_subcommand("report", "Per-layer parameter and weight-sharing report");
  report->add_option("original", original, "Original network document")->required();
  report->add_option("transformed", rewritten, "Rewritten network document")->required();
  report->add_flag("--json", as_json, "Machine-readable output");

  std::optional<std::string> property;
  auto* selftest = app.add_subcommand("selftest", "Run the bundled property suites");
  selftest->add_option("--seed", seed, "Suite seed");
  selftest->add_option("--property", property, "Run a single property")
      ->check(CLI::IsMember(destride::selftest_properties()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*transform) return cmd_transform(input, output, output_stride, storage);
    if (*init) return cmd_init(input, output, seed, storage);
    if (*verify) return cmd_verify(original, rewritten, trials, tol, seed);
    if (*report) return cmd_report(original, rewritten, as_json);
    if (*selftest) return cmd_selftest(seed, property);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kShape;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
