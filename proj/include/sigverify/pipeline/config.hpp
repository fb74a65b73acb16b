#pragma once

// Run configuration: a flat "key = value" text file, '#' starts a comment.
// Every key is optional. Keys and defaults:
//
//   sigma_narrow = 1          DoG narrow Gaussian
//   sigma_wide = 2            DoG wide Gaussian
//   binarize_threshold = auto Otsu, or a fixed level 0..255
//   scale = 1                 image downscaling factor in (0, 1]
//   d_ged = 25                keypoint sampling distance
//   c_node = 12.5             node deletion/insertion cost
//   c_edge = 200              edge deletion/insertion cost
//   ged_method = hed          hed or bp
//   d_inkball = 6             inkball spacing
//   lambda = 1                placement weight
//   tau = 64                  truncation per node
//   w_alpha = 64              angle weight
//   augmented = true          tangent-aware inkball models
//   fusion_weight = 0.5       GED weight in the combined score
//   threshold_ged, threshold_inkball, threshold_mcs
//                             decision thresholds; default is the skilled
//                             forgery global-EER threshold of the same data
//   allow_degenerate = false  replace zero baselines by 1e-9 with a warning
//   jobs = 0                  worker threads, 0 = hardware concurrency
//   cache_dir = .sigverify-cache

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "sigverify/errors.hpp"
#include "sigverify/ged.hpp"
#include "sigverify/imaging.hpp"
#include "sigverify/inkball.hpp"
#include "sigverify/text_format.hpp"

namespace sigverify {

struct RunConfig {
  PreprocessParams preprocess;
  double scale = 1.0;
  double d_ged = 25.0;
  CostParams cost;
  GedMethod ged_method = GedMethod::kHed;
  double d_inkball = 6.0;
  MatchParams match;
  double fusion_weight = 0.5;
  std::optional<double> threshold_ged, threshold_inkball, threshold_mcs;
  bool allow_degenerate = false;
  int jobs = 0;
  std::string cache_dir = ".sigverify-cache";

  int worker_count() const {
    if (jobs > 0) return jobs;
    return std::max(1, int(std::thread::hardware_concurrency()));
  }

  void validate() const {
    if (!(preprocess.sigma_narrow > 0.0 && preprocess.sigma_narrow < preprocess.sigma_wide)) {
      throw ParameterError("need 0 < sigma_narrow < sigma_wide");
    }
    if (!(scale > 0.0 && scale <= 1.0)) throw ParameterError("scale must be in (0, 1]");
    if (!(d_ged >= 1.0)) throw ParameterError("d_ged must be >= 1");
    if (!(cost.c_node > 0.0)) throw ParameterError("c_node must be > 0");
    cost.validate();
    if (ged_method == GedMethod::kExact) throw ParameterError("ged_method must be hed or bp");
    if (!(d_inkball >= 1.0)) throw ParameterError("d_inkball must be >= 1");
    match.validate();
    if (!(fusion_weight >= 0.0 && fusion_weight <= 1.0)) throw ParameterError("fusion_weight must be in [0, 1]");
    if (jobs < 0) throw ParameterError("jobs must be >= 0");
  }
};

namespace detail {

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError("expected a boolean, got '" + v + "'");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = std::string(trim(raw.substr(0, hash)));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ParameterError(where + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    try {
      if (key == "sigma_narrow") c.preprocess.sigma_narrow = parse_double(value);
      else if (key == "sigma_wide") c.preprocess.sigma_wide = parse_double(value);
      else if (key == "binarize_threshold") {
        if (value == "auto") c.preprocess.threshold.reset();
        else c.preprocess.threshold = int(parse_int(value));
      }
      else if (key == "scale") c.scale = parse_double(value);
      else if (key == "d_ged") c.d_ged = parse_double(value);
      else if (key == "c_node") c.cost.c_node = parse_double(value);
      else if (key == "c_edge") c.cost.c_edge = parse_double(value);
      else if (key == "ged_method") {
        if (value == "hed") c.ged_method = GedMethod::kHed;
        else if (value == "bp") c.ged_method = GedMethod::kBp;
        else throw ParameterError("ged_method must be hed or bp");
      }
      else if (key == "d_inkball") c.d_inkball = parse_double(value);
      else if (key == "lambda") c.match.lambda = parse_double(value);
      else if (key == "tau") c.match.tau = parse_double(value);
      else if (key == "w_alpha") c.match.w_alpha = parse_double(value);
      else if (key == "augmented") c.match.augmented = detail::parse_bool(value);
      else if (key == "fusion_weight") c.fusion_weight = parse_double(value);
      else if (key == "threshold_ged") c.threshold_ged = parse_double(value);
      else if (key == "threshold_inkball") c.threshold_inkball = parse_double(value);
      else if (key == "threshold_mcs") c.threshold_mcs = parse_double(value);
      else if (key == "allow_degenerate") c.allow_degenerate = detail::parse_bool(value);
      else if (key == "jobs") c.jobs = int(parse_int(value));
      else if (key == "cache_dir") c.cache_dir = value;
      else throw ParameterError("unknown key '" + key + "'");
    } catch (const ParameterError& e) {
      throw ParameterError(where + e.what());
    } catch (const FormatError& e) {
      throw ParameterError(where + e.what());
    }
  }
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sigverify
