#pragma once

#include <optional>
#include <span>
#include <string>

#include "hfno/fno.hpp"

namespace hfno {

// Typed load/save failures; the CLI maps these to exit code 2.
class IoError : public std::runtime_error {
 public:
  enum class Kind {
    Io,
    BadMagic,
    BadVersion,
    Truncated,
    BadHeader,
    ManifestMismatch,
    CountMismatch,
  };
  IoError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Write-temp-then-rename so concurrent readers never see partial files.
void atomic_write(const std::string& path, std::span<const char> bytes);

// Container layout shared by checkpoints ("HFNO") and datasets ("HFND"):
// magic, u32 version, u64 header length, UTF-8 JSON header with a tensor
// manifest (name, dtype, shape, offset), then contiguous little-endian
// payload in manifest order. Roundtrips are bit-exact.
inline constexpr uint32_t kFormatVersion = 1;

void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

struct DatasetSample {
  Scenario scn;
  TLField tl;
  std::optional<EncodedInput> enc;  // optional precomputed channels
};

struct Dataset {
  Grid2D grid;
  std::optional<SynthConfig> gen;  // present for synthetically generated sets
  std::vector<DatasetSample> samples;
};

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace hfno
