#pragma once

#include <string>
#include <utility>
#include <vector>

#include "epilab/extreal.hpp"
#include "epilab/types.hpp"

namespace epilab {

enum class VerdictStatus { Holds, Fails, Inconclusive, PreconditionFailed };

const char* to_string(VerdictStatus status);

struct NamedValue {
  std::string name;
  ExtReal value;
};

/// A point or index at which a check was decided, with the measured values.
struct Witness {
  std::string label;
  Point point;
  std::vector<NamedValue> values;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Inconclusive;
  std::vector<Witness> witnesses;
  std::vector<std::pair<std::string, double>> tolerances;
  std::string note;

  bool holds() const { return status == VerdictStatus::Holds; }
  bool fails() const { return status == VerdictStatus::Fails; }
  bool conclusive() const {
    return status == VerdictStatus::Holds || status == VerdictStatus::Fails;
  }
};

/// Builds a verdict; Holds and Fails must come with at least one witness.
Verdict make_verdict(VerdictStatus status, std::vector<Witness> witnesses,
                     std::vector<std::pair<std::string, double>> tolerances, std::string note = {});

/// Holds if every part holds, Fails if any part fails, otherwise the first
/// non-conclusive status. Witnesses are concatenated.
Verdict conjunction(const std::vector<Verdict>& parts, std::string note = {});

}  // namespace epilab
