#include "ywsym/report.hpp"

namespace ywsym {

std::string to_string(Status s) {
  switch (s) {
    case Status::verified:
      return "verified";
    case Status::verified_with_assumption:
      return "verified_with_assumption";
    case Status::discrepancy:
      return "discrepancy";
    case Status::failed:
      return "failed";
    case Status::stuck:
      return "stuck";
  }
  return "unknown";
}

}  // namespace ywsym
