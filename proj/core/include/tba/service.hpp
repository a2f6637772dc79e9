#pragma once

#include <mutex>
#include <span>
#include <vector>

#include "tba/beacon.hpp"
#include "tba/repository.hpp"

namespace httplib {
class Server;
}

namespace tba {

/// Read-only service over a beacon archive snapshot.
///   GET /latest        -> newest emission
///   GET /emission?t=N  -> archived emission at t, 404 if absent
void attach_beacon_routes(httplib::Server& server, std::vector<BeaconEmission> archive);

/// Hash-and-publish service over a live log. Appends are serialized; reads
/// see a snapshot.
///   POST /submit {"s": <64 hex>[, "t": <u64>]} -> {"t":..., "v":...}
///   GET  /lookup?v=<64 hex>                    -> {"t":...}, 404 if absent
class HapService {
 public:
  explicit HapService(HapLog& log) : log_(log) {}
  void attach(httplib::Server& server);

 private:
  HapLog& log_;
  std::mutex mu_;
};

}  // namespace tba
