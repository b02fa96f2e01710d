#include "destride/spec_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "destride/errors.hpp"
#include "json.hpp"

namespace destride {

namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t kAutoSidecarThreshold = 65536;

std::span<double> weights_of(Layer& layer) {
  if (auto* c = std::get_if<ConvLayer>(&layer)) return c->weights.values();
  if (auto* d = std::get_if<DenseLayer>(&layer)) return d->weights.values();
  return {};
}

std::span<const double> weights_of(const Layer& layer) {
  if (const auto* c = std::get_if<ConvLayer>(&layer)) return c->weights.values();
  if (const auto* d = std::get_if<DenseLayer>(&layer)) return d->weights.values();
  return {};
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw SpecError(where + ": missing \"" + key + "\"");
  return obj.at(key);
}

std::size_t positive(const json& v, const std::string& what) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
    throw SpecError(what + " must be a positive integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::size_t> index_list(const json& v, const std::string& what) {
  if (!v.is_array()) throw SpecError(what + " must be an array");
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(positive(e, what + " entry"));
  return out;
}

void read_sidecar(const std::filesystem::path& path, NetworkSpec& net, const std::vector<std::size_t>& lengths) {
  std::vector<std::span<double>> targets;
  for (auto& layer : net.layers) {
    auto w = weights_of(layer);
    if (!w.empty()) targets.push_back(w);
  }
  if (lengths.size() != targets.size()) {
    throw SpecError("weights_file declares " + std::to_string(lengths.size()) + " layers, network has " +
                    std::to_string(targets.size()) + " weighted layers");
  }
  std::size_t total = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] != targets[i].size()) {
      throw SpecError("weights_file length " + std::to_string(lengths[i]) + " for weighted layer " +
                      std::to_string(i + 1) + " does not match its shape (" + std::to_string(targets[i].size()) + ")");
    }
    total += lengths[i];
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weights file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != total * 8) {
    throw SpecError("weights file " + path.string() + " holds " + std::to_string(bytes.size()) + " bytes, expected " +
                    std::to_string(total * 8));
  }
  std::size_t pos = 0;
  for (auto target : targets) {
    for (auto& v : target) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[pos + static_cast<std::size_t>(b)];
      v = std::bit_cast<double>(bits);
      pos += 8;
    }
  }
}

void write_sidecar(const std::filesystem::path& path, const NetworkSpec& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write weights file " + path.string());
  for (const auto& layer : net.layers) {
    for (double v : weights_of(layer)) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      char buf[8];
      for (auto& c : buf) {
        c = static_cast<char>(bits & 0xff);
        bits >>= 8;
      }
      out.write(buf, 8);
    }
  }
  if (!out) throw IoError("failed writing weights file " + path.string());
}

json layer_json(const Layer& layer, bool with_weights) {
  json j;
  if (const auto* c = std::get_if<ConvLayer>(&layer)) {
    j["kind"] = "conv";
    j["channels_out"] = c->weights.channels_out();
    j["kernel"] = {c->weights.rows(), c->weights.cols()};
    j["stride"] = c->stride;
  } else if (const auto* a = std::get_if<ActivationLayer>(&layer)) {
    j["kind"] = "activation";
    j["function"] = activation_name(a->function);
  } else if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    j["kind"] = "fully_connected";
    j["units"] = d->units();
    if (d->flatten_order) j["flatten_order"] = *d->flatten_order;
  }
  if (with_weights && kind_of(layer) != LayerKind::activation) {
    const auto w = weights_of(layer);
    j["weights"] = std::vector<double>(w.begin(), w.end());
  }
  return j;
}

json document_json(const SpecDocument& doc, bool inline_weights) {
  const auto& net = doc.network;
  json j;
  j["schema_version"] = doc.schema_version;
  json n;
  n["name"] = net.name;
  n["provenance"] = net.provenance;
  n["input_shape"] = {net.input_shape.channels, net.input_shape.height, net.input_shape.width};
  n["layers"] = json::array();
  for (const auto& layer : net.layers) n["layers"].push_back(layer_json(layer, doc.has_weights && inline_weights));
  j["network"] = std::move(n);
  if (doc.transform) {
    const auto& t = *doc.transform;
    json entries = json::array();
    for (const auto& e : t.input_map.entries()) entries.push_back({e.source_channel, e.p, e.q});
    j["transform"] = {
        {"source", t.source},
        {"output_stride", t.output_stride},
        {"input_map",
         {{"source_channels", t.input_map.source_channels()}, {"stride", t.input_map.stride()}, {"entries", entries}}},
        {"flatten_permutation", t.flatten.sources()},
    };
  }
  return j;
}

TransformLink parse_link(const json& t) {
  const std::string where = "transform";
  if (!t.is_object()) throw SpecError("transform must be an object");
  const auto& source = require(t, "source", where);
  if (!source.is_string()) throw SpecError("transform.source must be a string");
  const auto& im = require(t, "input_map", where);
  ChannelMap map(positive(require(im, "source_channels", "input_map"), "input_map.source_channels"),
                 positive(require(im, "stride", "input_map"), "input_map.stride"));
  if (im.contains("entries")) {
    const auto& entries = im.at("entries");
    if (!entries.is_array() || entries.size() != map.size()) throw SpecError("input_map.entries has the wrong length");
    for (std::size_t i = 0; i < map.size(); ++i) {
      const auto triple = index_list(entries[i], "input_map entry");
      const auto& e = map.entries()[i];
      if (triple.size() != 3 || triple[0] != e.source_channel || triple[1] != e.p || triple[2] != e.q) {
        throw SpecError("input_map entry " + std::to_string(i + 1) + " does not follow (k, p, q) order");
      }
    }
  }
  std::size_t output_stride = 1;
  if (t.contains("output_stride")) output_stride = positive(t.at("output_stride"), "transform.output_stride");
  try {
    return {source.get<std::string>(), output_stride, std::move(map),
            FlattenPermutation(index_list(require(t, "flatten_permutation", where), "flatten_permutation"))};
  } catch (const ArgumentError& e) {
    throw SpecError(e.what());
  }
}

}  // namespace

SpecDocument parse_spec(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("parse error: ") + e.what());
  }

  try {
    SpecDocument doc;
    const auto& version = require(j, "schema_version", "document");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
      throw SpecError("unsupported schema_version " + version.dump() + " (supported: " +
                      std::to_string(kSchemaVersion) + ")");
    }
    const auto& n = require(j, "network", "document");
    const auto& shape = require(n, "input_shape", "network");
    if (!shape.is_array() || shape.size() != 3) throw SpecError("input_shape must be [channels, height, width]");
    const MapShape input{positive(shape[0], "input channels"), positive(shape[1], "input height"),
                         positive(shape[2], "input width")};

    const auto& layers = require(n, "layers", "network");
    if (!layers.is_array()) throw SpecError("layers must be an array");
    std::vector<LayerDesc> descs;
    std::size_t with_weights = 0, weighted = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      const std::string where = "layer " + std::to_string(i + 1);
      const auto& kind = require(l, "kind", where);
      if (kind == "conv") {
        const auto& kernel = require(l, "kernel", where);
        if (!kernel.is_array() || kernel.size() != 2) throw SpecError(where + ": kernel must be [height, width]");
        std::size_t stride = 1;
        if (l.contains("stride")) stride = positive(l.at("stride"), where + " stride");
        descs.emplace_back(ConvDesc{positive(require(l, "channels_out", where), where + " channels_out"),
                                    positive(kernel[0], where + " kernel height"),
                                    positive(kernel[1], where + " kernel width"), stride});
      } else if (kind == "activation") {
        const auto& fn = require(l, "function", where);
        if (!fn.is_string()) throw SpecError(where + ": function must be a string");
        try {
          descs.emplace_back(ActivationDesc{parse_activation(fn.get<std::string>())});
        } catch (const ArgumentError& e) {
          throw SpecError(where + ": " + e.what());
        }
      } else if (kind == "fully_connected") {
        descs.emplace_back(DenseDesc{positive(require(l, "units", where), where + " units")});
      } else {
        throw SpecError(where + ": unsupported layer kind " + kind.dump());
      }
      if (kind != "activation") {
        ++weighted;
        if (l.contains("weights")) ++with_weights;
      }
    }

    doc.network = build_network(require(n, "name", "network").get<std::string>(), input, descs);
    if (n.contains("provenance")) doc.network.provenance = n.at("provenance").get<std::string>();

    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      auto& layer = doc.network.layers[i];
      if (auto* d = std::get_if<DenseLayer>(&layer); d && l.contains("flatten_order")) {
        d->flatten_order = index_list(l.at("flatten_order"), "layer " + std::to_string(i + 1) + " flatten_order");
      }
      if (!l.contains("weights")) continue;
      const auto& w = l.at("weights");
      auto target = weights_of(layer);
      if (!w.is_array() || w.size() != target.size()) {
        throw SpecError("layer " + std::to_string(i + 1) + ": expected " + std::to_string(target.size()) +
                        " weights, got " + (w.is_array() ? std::to_string(w.size()) : std::string("non-array")));
      }
      for (std::size_t k = 0; k < target.size(); ++k) {
        if (!w[k].is_number()) throw SpecError("layer " + std::to_string(i + 1) + ": non-numeric weight");
        target[k] = w[k].get<double>();
      }
    }

    const bool sidecar = j.contains("weights_file");
    if (sidecar && with_weights > 0) throw SpecError("weights given both inline and in weights_file");
    if (!sidecar && with_weights != 0 && with_weights != weighted) {
      throw SpecError("inline weights present for only some layers");
    }
    if (sidecar) {
      const auto& wf = j.at("weights_file");
      const auto& path = require(wf, "path", "weights_file");
      if (!path.is_string()) throw SpecError("weights_file.path must be a string");
      read_sidecar(base_dir / path.get<std::string>(), doc.network,
                   index_list(require(wf, "lengths", "weights_file"), "weights_file.lengths"));
    }
    doc.has_weights = sidecar || with_weights > 0 || weighted == 0;

    if (j.contains("transform")) doc.transform = parse_link(j.at("transform"));
    infer_shapes(doc.network);
    return doc;
  } catch (const json::exception& e) {
    throw SpecError(std::string("schema error: ") + e.what());
  }
}

SpecDocument load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string to_json_text(const SpecDocument& doc) { return document_json(doc, true).dump(1); }

void save_spec(const SpecDocument& doc, const std::filesystem::path& path, WeightStorage storage) {
  std::size_t total = 0;
  for (const auto& layer : doc.network.layers) total += weights_of(layer).size();
  const bool sidecar = doc.has_weights && (storage == WeightStorage::sidecar ||
                                           (storage == WeightStorage::automatic && total > kAutoSidecarThreshold));

  json j = document_json(doc, !sidecar);
  if (sidecar) {
    auto bin = path;
    bin.replace_extension(".weights.bin");
    write_sidecar(bin, doc.network);
    std::vector<std::size_t> lengths;
    for (const auto& layer : doc.network.layers) {
      const auto n = weights_of(layer).size();
      if (kind_of(layer) != LayerKind::activation) lengths.push_back(n);
    }
    j["weights_file"] = {{"path", bin.filename().string()}, {"lengths", lengths}};
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace destride
