#include "epilab/verdict.hpp"

namespace epilab {

const char* to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Holds: return "holds";
    case VerdictStatus::Fails: return "fails";
    case VerdictStatus::Inconclusive: return "inconclusive";
    case VerdictStatus::PreconditionFailed: return "precondition-failed";
  }
  return "?";
}

Verdict make_verdict(VerdictStatus status, std::vector<Witness> witnesses,
                     std::vector<std::pair<std::string, double>> tolerances, std::string note) {
  if ((status == VerdictStatus::Holds || status == VerdictStatus::Fails) && witnesses.empty()) {
    fail(ErrorCode::Internal, std::string("a '") + to_string(status) + "' verdict needs a witness");
  }
  return {status, std::move(witnesses), std::move(tolerances), std::move(note)};
}

Verdict conjunction(const std::vector<Verdict>& parts, std::string note) {
  Verdict out;
  out.note = std::move(note);
  bool all_hold = !parts.empty();
  bool any_fail = false;
  VerdictStatus other = VerdictStatus::Inconclusive;
  bool other_set = false;
  for (const Verdict& p : parts) {
    for (const auto& w : p.witnesses) out.witnesses.push_back(w);
    for (const auto& t : p.tolerances) out.tolerances.push_back(t);
    if (p.fails()) any_fail = true;
    if (!p.holds()) {
      all_hold = false;
      if (!p.fails() && !other_set) {
        other = p.status;
        other_set = true;
      }
    }
  }
  out.status = any_fail ? VerdictStatus::Fails : all_hold ? VerdictStatus::Holds : other;
  return out;
}

}  // namespace epilab
