#include "tba/service.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "tba/errors.hpp"

namespace tba {

namespace {

nlohmann::json emission_json(const BeaconEmission& e) {
  nlohmann::json j;
  j["t"] = e.t;
  j["commit"] = e.commitment.hex();
  if (e.reveal) {
    j["reveal"] = to_hex(*e.reveal);
  } else {
    j["reveal"] = nullptr;
  }
  return j;
}

}  // namespace

void attach_beacon_routes(httplib::Server& server, std::vector<BeaconEmission> archive) {
  auto shared = std::make_shared<std::vector<BeaconEmission>>(std::move(archive));

  server.Get("/latest", [shared](const httplib::Request&, httplib::Response& res) {
    if (shared->empty()) {
      res.status = 404;
      return;
    }
    res.set_content(emission_json(shared->back()).dump(), "application/json");
  });

  server.Get("/emission", [shared](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("t")) {
      res.status = 400;
      return;
    }
    const Timestamp t = std::stoull(req.get_param_value("t"));
    for (const auto& e : *shared) {
      if (e.t == t) {
        res.set_content(emission_json(e).dump(), "application/json");
        return;
      }
    }
    res.status = 404;
  });
}

void HapService::attach(httplib::Server& server) {
  server.Post("/submit", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      nlohmann::json body = nlohmann::json::parse(req.body);
      Digest s = Digest::from_hex(body.at("s").get<std::string>());
      Timestamp t = body.contains("t") ? body.at("t").get<Timestamp>() : now_ms();
      std::optional<HapRecord> record;
      {
        std::lock_guard<std::mutex> lock(mu_);
        record = log_.submit(s, t);
      }
      if (!record) {
        res.status = 503;  // dropper: the caller observes absence
        return;
      }
      nlohmann::json out;
      out["t"] = record->t;
      out["v"] = record->v.hex();
      res.set_content(out.dump(), "application/json");
    } catch (const std::exception&) {
      res.status = 400;
    }
  });

  server.Get("/lookup", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("v")) {
      res.status = 400;
      return;
    }
    try {
      Digest v = Digest::from_hex(req.get_param_value("v"));
      std::optional<Timestamp> t;
      {
        std::lock_guard<std::mutex> lock(mu_);
        t = log_.lookup(v);
      }
      if (!t) {
        res.status = 404;
        return;
      }
      nlohmann::json out;
      out["t"] = *t;
      res.set_content(out.dump(), "application/json");
    } catch (const std::exception&) {
      res.status = 400;
    }
  });
}

}  // namespace tba
