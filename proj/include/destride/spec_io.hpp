#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "destride/network.hpp"
#include "destride/transform.hpp"

namespace destride {

inline constexpr int kSchemaVersion = 1;

/// Link from a rewritten network back to the network it was derived from.
struct TransformLink {
  std::string source;  // name of the original network
  std::size_t output_stride = 1;
  ChannelMap input_map;
  FlattenPermutation flatten;
};

/// A network document as stored on disk.
///
/// The text form is a JSON object:
///
///     {
///       "schema_version": 1,
///       "network": {
///         "name": "lenet", "provenance": "original",
///         "input_shape": [1, 28, 28],
///         "layers": [
///           {"kind": "conv", "channels_out": 20, "kernel": [5, 5], "stride": 1, "weights": [...]},
///           {"kind": "activation", "function": "relu"},
///           {"kind": "fully_connected", "units": 500, "weights": [...]}
///         ]
///       },
///       "weights_file": {"path": "lenet.weights.bin", "lengths": [500, ...]},
///       "transform": {...}
///     }
///
/// Weights are either inline (decimal arrays, conv order out/in/row/col, fc
/// row-major units x inputs), in a little-endian float64 sidecar listed by
/// "weights_file" (layer order, one declared length per weighted layer), or
/// absent altogether for structure-only documents.
struct SpecDocument {
  int schema_version = kSchemaVersion;
  NetworkSpec network;
  bool has_weights = true;
  std::optional<TransformLink> transform;
};

enum class WeightStorage { automatic, inline_values, sidecar };

/// Parses document text; a sidecar path is resolved against `base_dir`.
/// Throws SpecError for malformed or unsupported documents, ShapeError when
/// the declared layers do not fit together, IoError when the sidecar cannot
/// be read.
SpecDocument parse_spec(std::string_view text, const std::filesystem::path& base_dir = ".");
SpecDocument load_spec(const std::filesystem::path& path);

/// Writes `doc` to `path`. With a sidecar, weights go to
/// `<stem>.weights.bin` next to `path`. `automatic` picks the sidecar above
/// 65536 weights. Throws IoError.
void save_spec(const SpecDocument& doc, const std::filesystem::path& path,
               WeightStorage storage = WeightStorage::automatic);

/// JSON text with inline weights (or none, for structure-only documents).
std::string to_json_text(const SpecDocument& doc);

}  // namespace destride
