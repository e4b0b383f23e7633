#pragma once

#include <memory>
#include <string>

#include "brailleband/error.hpp"
#include "brailleband/trainer.hpp"

namespace httplib {
class Server;
}

namespace brailleband {

// JSON request/response routes over a TrainerService:
//   POST /sessions                         {"subject", "char_gap_ms", "seed"?, "config"?}
//   POST /sessions/{id}/transmit           {"word"?}
//   POST /sessions/{id}/guess              {"record", "guess"}
//   GET  /sessions/{id}/timeline/{record}
//   POST /sessions/{id}/rating             {"rating"}
//   GET  /report?gaps=2000,1500&reference=1500&family=all|selected&alpha=0.05
// Errors come back as {"error": code, "message": text} with a 4xx status.
void mount_routes(httplib::Server& server, TrainerService& service);

class HttpServer {
 public:
  explicit HttpServer(TrainerService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port, or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false if the listener failed.
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  std::unique_ptr<httplib::Server> server_;
};

int http_status_for(ErrorCode code) noexcept;

}  // namespace brailleband
