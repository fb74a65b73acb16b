#pragma once

// Writes a synthetic dataset as PNG files plus a manifest.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include "sigverify/image_io.hpp"
#include "sigverify/pipeline/cache.hpp"
#include "sigverify/synthetic.hpp"

namespace sigverify {

struct SyntheticDatasetSpec {
  int users = 10;
  int genuine = 6;
  int forgeries = 3;
  int references = 3;
  std::uint64_t seed = 1;
};

/// Returns the manifest path.
inline std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                                     const SyntheticDatasetSpec& spec) {
  const auto users = synthetic_dataset(spec.users, spec.genuine, spec.forgeries, spec.seed);
  std::string manifest = "dataset synthetic\ndpi 100\nreferences " + std::to_string(spec.references) + "\n";
  for (const auto& u : users) {
    const auto user_dir = dir / u.id;
    std::filesystem::create_directories(user_dir);
    char name[32];
    for (std::size_t k = 0; k < u.genuine.size(); ++k) {
      std::snprintf(name, sizeof name, "genuine_%zu.png", k + 1);
      write_png((user_dir / name).string(), u.genuine[k]);
    }
    for (std::size_t k = 0; k < u.forgeries.size(); ++k) {
      std::snprintf(name, sizeof name, "forgery_%zu.png", k + 1);
      write_png((user_dir / name).string(), u.forgeries[k]);
    }
    manifest += "user " + u.id + "\ngenuine " + u.id + "/genuine_*.png\n";
    if (!u.forgeries.empty()) manifest += "forgery " + u.id + "/forgery_*.png\n";
  }
  const auto path = dir / "manifest.txt";
  write_file_atomic(path, manifest);
  return path;
}

}  // namespace sigverify
