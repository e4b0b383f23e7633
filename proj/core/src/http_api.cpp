#include "brailleband/http_api.hpp"

#include <httplib.h>

#include <charconv>

#include <fmt/format.h>

#include "brailleband/error.hpp"
#include "brailleband/json_io.hpp"

namespace brailleband {

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  reply(res, status, {{"error", code}, {"message", message}});
}

// Runs a handler, mapping domain and parse failures to 4xx responses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    reply_error(res, http_status_for(e.code()), to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    reply_error(res, 400, "InvalidInput", e.what());
  }
}

nlohmann::json body_of(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  auto j = nlohmann::json::parse(req.body);
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "request body must be a JSON object");
  return j;
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidInput, fmt::format("{} '{}' is not an integer", what, s));
  }
  return v;
}

ReportOptions report_options(const httplib::Request& req) {
  ReportOptions opts;
  if (req.has_param("gaps")) {
    std::vector<int> gaps;
    const auto list = req.get_param_value("gaps");
    std::size_t start = 0;
    while (start <= list.size()) {
      const auto comma = list.find(',', start);
      const auto item = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!item.empty()) gaps.push_back(parse_int(item, "gap"));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    opts.gaps = std::move(gaps);
  }
  if (req.has_param("reference")) opts.reference_gap = parse_int(req.get_param_value("reference"), "reference");
  if (req.has_param("family")) {
    const auto f = req.get_param_value("family");
    if (f == "all") opts.pairwise.family = CorrectionFamily::AllPairs;
    else if (f == "selected") opts.pairwise.family = CorrectionFamily::SelectedPairs;
    else throw Error(ErrorCode::InvalidInput, fmt::format("family must be 'all' or 'selected', got '{}'", f));
  }
  if (req.has_param("alpha")) {
    try {
      opts.pairwise.alpha = std::stod(req.get_param_value("alpha"));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "alpha is not a number");
    }
  }
  return opts;
}

}  // namespace

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownRecord:
      return 404;
    case ErrorCode::SessionClosed:
    case ErrorCode::AlreadyScored:
      return 409;
    case ErrorCode::InsufficientData:
    case ErrorCode::DegenerateData:
      return 422;
    case ErrorCode::Io:
      return 500;
    default:
      return 400;
  }
}

void mount_routes(httplib::Server& server, TrainerService& service) {
  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = body_of(req);
      SessionRequest request;
      request.subject = body.at("subject").get<std::string>();
      request.char_gap_ms = body.at("char_gap_ms").get<int>();
      if (body.contains("config")) request.config = body.at("config").get<TrialConfig>();
      if (body.contains("seed")) request.seed = body.at("seed").get<std::uint64_t>();
      reply(res, 201, service.start_session(request));
    });
  });

  server.Post(R"(/sessions/([^/]+)/transmit)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = body_of(req);
      std::optional<std::string> word;
      if (body.contains("word")) word = body.at("word").get<std::string>();
      reply(res, 200, service.transmit_word(req.matches[1], word));
    });
  });

  server.Post(R"(/sessions/([^/]+)/guess)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = body_of(req);
      const auto record = service.record_guess(req.matches[1], body.at("record").get<int>(),
                                               body.at("guess").get<std::string>());
      nlohmann::json out = record;
      const auto session = service.session(req.matches[1]);
      out["session_accuracy_pct"] = session.accuracy() ? nlohmann::json(*session.accuracy()) : nlohmann::json();
      reply(res, 200, out);
    });
  });

  server.Get(R"(/sessions/([^/]+)/timeline/(\d+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const int record = parse_int(req.matches[2].str(), "record");
      reply(res, 200, service.timeline(req.matches[1], record));
    });
  });

  server.Post(R"(/sessions/([^/]+)/rating)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = body_of(req);
      reply(res, 200, service.submit_rating(req.matches[1], body.at("rating").get<double>()));
    });
  });

  server.Get("/report", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, service.report(report_options(req))); });
  });
}

HttpServer::HttpServer(TrainerService& service) : server_(std::make_unique<httplib::Server>()) {
  mount_routes(*server_, service);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace brailleband
