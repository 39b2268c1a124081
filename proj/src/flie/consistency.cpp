#include "xflie/flie/consistency.hpp"

namespace xflie::flie {

Verdict ConsistencyWindow::push(FovZone zone, bool detected) {
  if (verdict_ != Verdict::Pending) return verdict_;
  if (detected) {
    if (++count_ >= window_) verdict_ = Verdict::Accept;
  } else if (zone == FovZone::Inside) {
    verdict_ = Verdict::Reject;
  } else {
    count_ = 0;
  }
  return verdict_;
}

}  // namespace xflie::flie
