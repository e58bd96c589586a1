#pragma once

// Structured verification outcomes shared by all checking modules.

#include <string>
#include <vector>

namespace ywsym {

enum class Status {
  verified,                  // identity holds exactly
  verified_with_assumption,  // holds modulo declared assumptions
  discrepancy,               // computed value differs from a recorded one
  failed,                    // identity does not hold
  stuck,                     // rewriting could not complete
};

std::string to_string(Status s);

struct Report {
  std::string id;
  Status status = Status::failed;
  std::string detail;                   // human-readable explanation
  std::string residual;                 // nonzero remainder, when any
  std::vector<std::string> assumptions; // ledger of assumptions used
  int window = 0;                       // truncation window, when relevant

  bool ok() const {
    return status == Status::verified ||
           status == Status::verified_with_assumption;
  }
};

}  // namespace ywsym
