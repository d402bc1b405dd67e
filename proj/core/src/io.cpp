#include "hfno/io.hpp"

#include <unistd.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

namespace hfno {

using nlohmann::json;

void atomic_write(const std::string& path, std::span<const char> bytes) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(IoError::Kind::Io, "cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(IoError::Kind::Io, "short write: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError(IoError::Kind::Io, "rename failed: " + target.string() + ": " + ec.message());
  }
}

namespace {

struct Writer {
  json manifest = json::array();
  std::string payload;

  void add(const std::string& name, const char* dtype, std::vector<size_t> shape,
           const void* data, size_t bytes) {
    json t;
    t["name"] = name;
    t["dtype"] = dtype;
    t["shape"] = shape;
    t["offset"] = payload.size();
    manifest.push_back(std::move(t));
    payload.append(static_cast<const char*>(data), bytes);
  }

  void add_f64(const std::string& name, std::vector<size_t> shape,
               std::span<const double> v) {
    add(name, "f64", std::move(shape), v.data(), v.size() * sizeof(double));
  }
  void add_c128(const std::string& name, std::vector<size_t> shape, std::span<const cd> v) {
    add(name, "c128", std::move(shape), v.data(), v.size() * sizeof(cd));
  }

  std::string finish(const char magic[4], json header) {
    header["tensors"] = std::move(manifest);
    std::string h = header.dump();
    std::string out;
    out.reserve(16 + h.size() + payload.size());
    out.append(magic, 4);
    uint32_t ver = kFormatVersion;
    uint64_t hlen = h.size();
    out.append(reinterpret_cast<const char*>(&ver), 4);
    out.append(reinterpret_cast<const char*>(&hlen), 8);
    out += h;
    out += payload;
    return out;
  }
};

struct TensorRef {
  std::string dtype;
  std::vector<size_t> shape;
  size_t offset = 0;
  size_t count = 0;  // element count
};

struct Reader {
  json header;
  std::string payload;
  std::map<std::string, TensorRef> tensors;

  explicit Reader(const std::string& path, const char magic[4]) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::Io, "cannot open: " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() < 16) throw IoError(IoError::Kind::Truncated, "file shorter than header");
    if (std::memcmp(raw.data(), magic, 4) != 0)
      throw IoError(IoError::Kind::BadMagic, "bad magic in " + path);
    uint32_t ver;
    uint64_t hlen;
    std::memcpy(&ver, raw.data() + 4, 4);
    std::memcpy(&hlen, raw.data() + 8, 8);
    if (ver != kFormatVersion)
      throw IoError(IoError::Kind::BadVersion,
                    "unsupported format version " + std::to_string(ver) + " (expected " +
                        std::to_string(kFormatVersion) + ")");
    if (hlen > raw.size() - 16)
      throw IoError(IoError::Kind::Truncated, "header extends past end of file");
    try {
      header = json::parse(raw.substr(16, hlen));
    } catch (const json::exception& e) {
      throw IoError(IoError::Kind::BadHeader, std::string("header parse failure: ") + e.what());
    }
    payload = raw.substr(16 + hlen);

    if (!header.contains("tensors") || !header["tensors"].is_array())
      throw IoError(IoError::Kind::BadHeader, "missing tensor manifest");
    size_t expected_off = 0;
    for (const auto& t : header["tensors"]) {
      try {
        TensorRef ref;
        ref.dtype = t.at("dtype").get<std::string>();
        ref.shape = t.at("shape").get<std::vector<size_t>>();
        ref.offset = t.at("offset").get<size_t>();
        std::string name = t.at("name").get<std::string>();
        ref.count = 1;
        for (size_t d : ref.shape) ref.count *= d;
        if (ref.offset != expected_off)
          throw IoError(IoError::Kind::ManifestMismatch,
                        "tensor offsets not contiguous/increasing at " + name);
        size_t esz;
        if (ref.dtype == "f64") esz = 8;
        else if (ref.dtype == "c128") esz = 16;
        else if (ref.dtype == "f32") esz = 4;
        else if (ref.dtype == "c64") esz = 8;
        else
          throw IoError(IoError::Kind::ManifestMismatch, "unknown dtype " + ref.dtype);
        expected_off += ref.count * esz;
        tensors.emplace(std::move(name), std::move(ref));
      } catch (const json::exception& e) {
        throw IoError(IoError::Kind::BadHeader, std::string("bad manifest entry: ") + e.what());
      }
    }
    if (expected_off != payload.size())
      throw IoError(IoError::Kind::Truncated,
                    "payload length " + std::to_string(payload.size()) + " != manifest total " +
                        std::to_string(expected_off));
  }

  const TensorRef& find(const std::string& name, const char* dtype,
                        std::vector<size_t> shape) const {
    auto it = tensors.find(name);
    if (it == tensors.end())
      throw IoError(IoError::Kind::ManifestMismatch, "missing tensor " + name);
    const TensorRef& ref = it->second;
    if (ref.dtype != dtype)
      throw IoError(IoError::Kind::ManifestMismatch,
                    "tensor " + name + " has dtype " + ref.dtype + ", expected " + dtype);
    if (ref.shape != shape)
      throw IoError(IoError::Kind::ManifestMismatch, "tensor " + name + " shape mismatch");
    return ref;
  }

  void read_f64(const std::string& name, std::vector<size_t> shape,
                std::span<double> out) const {
    const TensorRef& ref = find(name, "f64", std::move(shape));
    if (ref.count != out.size())
      throw IoError(IoError::Kind::ManifestMismatch, "tensor " + name + " size mismatch");
    std::memcpy(out.data(), payload.data() + ref.offset, out.size() * sizeof(double));
  }

  void read_c128(const std::string& name, std::vector<size_t> shape, std::span<cd> out) const {
    const TensorRef& ref = find(name, "c128", std::move(shape));
    if (ref.count != out.size())
      throw IoError(IoError::Kind::ManifestMismatch, "tensor " + name + " size mismatch");
    std::memcpy(out.data(), payload.data() + ref.offset, out.size() * sizeof(cd));
  }
};

json grid_to_json(const Grid2D& g) {
  return json{{"n_range", g.n_range},
              {"n_depth", g.n_depth},
              {"dr", g.dr},
              {"dz", g.dz},
              {"r0", g.r0}};
}

Grid2D grid_from_json(const json& j) {
  Grid2D g;
  g.n_range = j.at("n_range").get<int>();
  g.n_depth = j.at("n_depth").get<int>();
  g.dr = j.at("dr").get<double>();
  g.dz = j.at("dz").get<double>();
  g.r0 = j.at("r0").get<double>();
  return g;
}

json stats_to_json(const StandardStats& s) {
  return json{{"mu_in", s.mu_in},
              {"sigma_in", s.sigma_in},
              {"mu_out", s.mu_out},
              {"sigma_out", s.sigma_out}};
}

StandardStats stats_from_json(const json& j) {
  StandardStats s;
  auto mi = j.at("mu_in").get<std::vector<double>>();
  auto si = j.at("sigma_in").get<std::vector<double>>();
  if (mi.size() != 4 || si.size() != 4)
    throw IoError(IoError::Kind::BadHeader, "stats must cover 4 channels");
  std::copy(mi.begin(), mi.end(), s.mu_in.begin());
  std::copy(si.begin(), si.end(), s.sigma_in.begin());
  s.mu_out = j.at("mu_out").get<double>();
  s.sigma_out = j.at("sigma_out").get<double>();
  return s;
}

}  // namespace

void save_checkpoint(const ModelParams& p, const std::string& path) {
  const Hyperparams& hp = p.hp;
  const size_t C = hp.width;
  json header;
  header["kind"] = "checkpoint";
  header["hyper"] = json{{"n_layers", hp.n_layers},
                         {"width", hp.width},
                         {"modes_z", hp.modes_z},
                         {"modes_r", hp.modes_r},
                         {"in_channels", hp.in_channels},
                         {"out_channels", hp.out_channels},
                         {"activation", hp.activation == Activation::Gelu ? "gelu" : "identity"}};
  header["stats"] = stats_to_json(p.stats);
  header["encodings"] = to_string(p.encoding);

  Writer w;
  w.add_f64("lift.w", {C, static_cast<size_t>(hp.in_channels)}, p.lift_w);
  w.add_f64("lift.b", {C}, p.lift_b);
  for (int i = 0; i < hp.n_layers; ++i) {
    std::string prefix = "layer" + std::to_string(i);
    w.add_c128(prefix + ".R",
               {C, C, static_cast<size_t>(hp.modes_z), static_cast<size_t>(2 * hp.modes_r)},
               p.layers[i].R);
    w.add_f64(prefix + ".W", {C, C}, p.layers[i].W);
    w.add_f64(prefix + ".b", {C}, p.layers[i].b);
  }
  w.add_f64("proj.w", {static_cast<size_t>(hp.out_channels), C}, p.proj_w);
  w.add_f64("proj.b", {static_cast<size_t>(hp.out_channels)}, p.proj_b);

  std::string bytes = w.finish("HFNO", std::move(header));
  atomic_write(path, bytes);
}

ModelParams load_checkpoint(const std::string& path) {
  Reader r(path, "HFNO");
  Hyperparams hp;
  try {
    const json& h = r.header.at("hyper");
    hp.n_layers = h.at("n_layers").get<int>();
    hp.width = h.at("width").get<int>();
    hp.modes_z = h.at("modes_z").get<int>();
    hp.modes_r = h.at("modes_r").get<int>();
    hp.in_channels = h.at("in_channels").get<int>();
    hp.out_channels = h.at("out_channels").get<int>();
    hp.activation =
        h.at("activation").get<std::string>() == "identity" ? Activation::Identity
                                                            : Activation::Gelu;
  } catch (const json::exception& e) {
    throw IoError(IoError::Kind::BadHeader, std::string("bad hyperparameters: ") + e.what());
  }
  if (hp.n_layers < 1 || hp.width < 1 || hp.modes_z < 1 || hp.modes_r < 1)
    throw IoError(IoError::Kind::BadHeader, "invalid hyperparameters");

  ModelParams p;
  p.hp = hp;
  try {
    p.stats = stats_from_json(r.header.at("stats"));
  } catch (const json::exception& e) {
    throw IoError(IoError::Kind::BadHeader, std::string("bad stats: ") + e.what());
  }
  if (r.header.contains("encodings")) {
    if (!variant_from_string(r.header["encodings"].get<std::string>(), p.encoding))
      throw IoError(IoError::Kind::BadHeader, "unknown encoding variant");
  }
  const size_t C = hp.width;
  p.lift_w.resize(C * hp.in_channels);
  p.lift_b.resize(C);
  r.read_f64("lift.w", {C, static_cast<size_t>(hp.in_channels)}, p.lift_w);
  r.read_f64("lift.b", {C}, p.lift_b);
  p.layers.resize(hp.n_layers);
  const size_t rlen = C * C * hp.modes_z * 2 * hp.modes_r;
  for (int i = 0; i < hp.n_layers; ++i) {
    std::string prefix = "layer" + std::to_string(i);
    auto& l = p.layers[i];
    l.R.resize(rlen);
    l.W.resize(C * C);
    l.b.resize(C);
    r.read_c128(prefix + ".R",
                {C, C, static_cast<size_t>(hp.modes_z), static_cast<size_t>(2 * hp.modes_r)},
                l.R);
    r.read_f64(prefix + ".W", {C, C}, l.W);
    r.read_f64(prefix + ".b", {C}, l.b);
  }
  p.proj_w.resize(static_cast<size_t>(hp.out_channels) * C);
  p.proj_b.resize(hp.out_channels);
  r.read_f64("proj.w", {static_cast<size_t>(hp.out_channels), C}, p.proj_w);
  r.read_f64("proj.b", {static_cast<size_t>(hp.out_channels)}, p.proj_b);
  return p;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  json header;
  header["kind"] = "dataset";
  header["grid"] = grid_to_json(ds.grid);
  header["n_samples"] = ds.samples.size();
  if (ds.gen) {
    const SynthConfig& g = *ds.gen;
    header["gen"] = json{{"seed", g.seed},
                         {"n_samples", g.n_samples},
                         {"profile_family", to_string(g.profile_family)},
                         {"bathy_family", to_string(g.bathy_family)},
                         {"perturbation_scale", g.perturbation_scale},
                         {"source_depth", g.source_depth},
                         {"source_freq", g.source_freq},
                         {"c_ref", g.c_ref},
                         {"v_sed", g.v_sed}};
  }
  json samples = json::array();
  for (const auto& s : ds.samples) {
    samples.push_back(json{{"source_depth", s.scn.source_depth},
                           {"source_freq", s.scn.source_freq},
                           {"c_ref", s.scn.c_ref},
                           {"v_sed", s.scn.ssf.v_sed}});
  }
  header["samples"] = std::move(samples);

  const size_t M = ds.grid.n_depth, N = ds.grid.n_range;
  Writer w;
  for (size_t k = 0; k < ds.samples.size(); ++k) {
    const auto& s = ds.samples[k];
    if (s.scn.ssf.c.rows != static_cast<int>(M) || s.scn.ssf.c.cols != static_cast<int>(N) ||
        s.tl.tl.rows != static_cast<int>(M) || s.tl.tl.cols != static_cast<int>(N))
      throw std::invalid_argument("save_dataset: sample shape mismatch");
    std::string prefix = "s" + std::to_string(k);
    w.add_f64(prefix + ".c", {M, N}, s.scn.ssf.c.a);
    w.add_f64(prefix + ".bathy", {N}, s.scn.ssf.bathy);
    w.add_f64(prefix + ".tl", {M, N}, s.tl.tl.a);
    if (s.enc) {
      std::vector<double> flat;
      flat.reserve(4 * M * N);
      for (int c = 0; c < 4; ++c)
        flat.insert(flat.end(), s.enc->ch[c].a.begin(), s.enc->ch[c].a.end());
      w.add_f64(prefix + ".enc", {4, M, N}, flat);
    }
  }
  std::string bytes = w.finish("HFND", std::move(header));
  atomic_write(path, bytes);
}

Dataset load_dataset(const std::string& path) {
  Reader r(path, "HFND");
  Dataset ds;
  size_t n = 0;
  try {
    ds.grid = grid_from_json(r.header.at("grid"));
    n = r.header.at("n_samples").get<size_t>();
    if (r.header.contains("gen")) {
      const json& g = r.header["gen"];
      SynthConfig cfg;
      cfg.seed = g.at("seed").get<uint64_t>();
      cfg.n_samples = g.at("n_samples").get<int>();
      cfg.grid = ds.grid;
      if (!profile_from_string(g.at("profile_family").get<std::string>(), cfg.profile_family))
        throw IoError(IoError::Kind::BadHeader, "unknown profile family");
      if (!bathy_from_string(g.at("bathy_family").get<std::string>(), cfg.bathy_family))
        throw IoError(IoError::Kind::BadHeader, "unknown bathymetry family");
      cfg.perturbation_scale = g.at("perturbation_scale").get<double>();
      cfg.source_depth = g.at("source_depth").get<double>();
      cfg.source_freq = g.at("source_freq").get<double>();
      cfg.c_ref = g.at("c_ref").get<double>();
      cfg.v_sed = g.at("v_sed").get<double>();
      ds.gen = cfg;
    }
  } catch (const json::exception& e) {
    throw IoError(IoError::Kind::BadHeader, std::string("bad dataset header: ") + e.what());
  }
  const json& sj = r.header.contains("samples") ? r.header["samples"] : json::array();
  if (sj.size() != n)
    throw IoError(IoError::Kind::CountMismatch,
                  "header sample count " + std::to_string(n) + " but " +
                      std::to_string(sj.size()) + " sample records");
  // every sample must have its tensors present
  const size_t M = ds.grid.n_depth, N = ds.grid.n_range;
  for (size_t k = 0; k < n; ++k) {
    std::string prefix = "s" + std::to_string(k);
    if (!r.tensors.count(prefix + ".tl"))
      throw IoError(IoError::Kind::CountMismatch,
                    "header sample count " + std::to_string(n) + " but tensor records stop at " +
                        std::to_string(k));
    DatasetSample s;
    s.scn.ssf.grid = ds.grid;
    s.tl.grid = ds.grid;
    s.scn.ssf.c = Mat(static_cast<int>(M), static_cast<int>(N));
    s.scn.ssf.bathy.assign(N, 0.0);
    s.tl.tl = Mat(static_cast<int>(M), static_cast<int>(N));
    try {
      s.scn.source_depth = sj[k].at("source_depth").get<double>();
      s.scn.source_freq = sj[k].at("source_freq").get<double>();
      s.scn.c_ref = sj[k].at("c_ref").get<double>();
      s.scn.ssf.v_sed = sj[k].at("v_sed").get<double>();
    } catch (const json::exception& e) {
      throw IoError(IoError::Kind::BadHeader, std::string("bad sample record: ") + e.what());
    }
    r.read_f64(prefix + ".c", {M, N}, s.scn.ssf.c.a);
    r.read_f64(prefix + ".bathy", {N}, s.scn.ssf.bathy);
    r.read_f64(prefix + ".tl", {M, N}, s.tl.tl.a);
    if (r.tensors.count(prefix + ".enc")) {
      std::vector<double> flat(4 * M * N);
      r.read_f64(prefix + ".enc", {4, M, N}, flat);
      EncodedInput e;
      e.grid = ds.grid;
      for (int c = 0; c < 4; ++c) {
        e.ch[c] = Mat(static_cast<int>(M), static_cast<int>(N));
        std::copy(flat.begin() + c * M * N, flat.begin() + (c + 1) * M * N, e.ch[c].a.begin());
      }
      s.enc = std::move(e);
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace hfno
