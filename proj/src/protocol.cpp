#include "distexp/protocol.hpp"

#include <algorithm>

namespace distexp {

std::string to_string(ModelKind model) {
  return model == ModelKind::SitePrediction ? "site" : "coordinator";
}

StarChannel::StarChannel(int k, int n, std::int64_t horizon)
    : k_(k), ledger_(n), active_(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0))) {
  if (k < 1) throw InvalidArgument("StarChannel: need at least one site");
}

void StarChannel::begin_step(std::int64_t t) {
  if (t < 1 || t > static_cast<std::int64_t>(active_.size())) {
    throw ProtocolViolation("StarChannel: step " + std::to_string(t) + " outside the horizon");
  }
  step_ = t;
  step_messages_ = 0;
}

void StarChannel::check_site(int site) const {
  if (site < 0 || site >= k_) {
    throw InvalidArgument("StarChannel: site " + std::to_string(site) + " does not exist");
  }
}

void StarChannel::charge(std::int64_t messages, int reals) {
  if (step_ == 0) throw ProtocolViolation("StarChannel: message sent before the first step");
  ledger_.record(messages, reals);
  step_messages_ += messages;
  if (messages > 0) active_[static_cast<std::size_t>(step_ - 1)] = true;
}

void StarChannel::to_coordinator(int site, int reals) {
  check_site(site);
  charge(1, reals);
}

void StarChannel::to_site(int site, int reals) {
  check_site(site);
  charge(1, reals);
}

void StarChannel::broadcast(int reals) { charge(k_, reals); }

bool StarChannel::any_message_in(std::int64_t from, std::int64_t to) const {
  from = std::max<std::int64_t>(from, 1);
  to = std::min<std::int64_t>(to, static_cast<std::int64_t>(active_.size()));
  for (std::int64_t t = from; t <= to; ++t) {
    if (active_[static_cast<std::size_t>(t - 1)]) return true;
  }
  return false;
}

}  // namespace distexp
