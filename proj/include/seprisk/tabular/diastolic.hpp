#pragma once

#include <algorithm>
#include <cctype>
#include <string>

#include "seprisk/tabular/cohort.hpp"

namespace seprisk::tabular {

// Ordinal coding of the diastolic-function assessment:
// normal -1, dysfunction without grade 0, grades I/II/III -> 1/2/3.
// Empty or "missing" gives kMissing; anything else is rejected.
inline double encode_diastolic(const std::string& label) {
  std::string s;
  for (char c : label)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '-' && c != '_')
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s.empty() || s == "missing" || s == "na") return kMissing;
  if (s == "normal") return -1.0;
  if (s == "dysfunction" || s == "dysfunctionungraded" || s == "abnormal") return 0.0;
  if (s == "gradei" || s == "grade1") return 1.0;
  if (s == "gradeii" || s == "grade2") return 2.0;
  if (s == "gradeiii" || s == "grade3") return 3.0;
  throw ValidationError("unrecognized diastolic function label '" + label + "'");
}

inline bool is_diastolic_code(double v) {
  return v == -1.0 || v == 0.0 || v == 1.0 || v == 2.0 || v == 3.0;
}

}  // namespace seprisk::tabular
