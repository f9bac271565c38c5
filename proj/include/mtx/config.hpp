#pragma once

#include <map>
#include <string>

namespace mtx {

// Named tolerances used by the verification checks. Keys are fixed; an
// override for an unknown key is an input error.
class Tolerances {
 public:
  static Tolerances defaults();

  double get(const std::string& key) const;
  void set(const std::string& key, double value);
  // "KEY=VAL"
  void apply_override(const std::string& assignment);
  const std::map<std::string, double>& all() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

}  // namespace mtx
