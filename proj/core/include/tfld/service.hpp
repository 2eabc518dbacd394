#pragma once
//
// HTTP/JSON front-end over SessionStore.
//
//   POST /api/sessions                                   -> 201 {session_id}
//   GET  /api/sessions/{id}                              -> rounds, digests, epsilon history
//   POST /api/sessions/{id}/rounds/{n}/{sheet}           -> 201 validation summary
//        sheet in {responses, dimensions, descriptions}; raw CSV body or a
//        multipart file; ?overwrite=true replaces; ?header=false for headerless
//        sessions is set at creation time instead.
//   GET  /api/sessions/{id}/rounds/{n}/report?epsilon=E  -> RoundReport
//   GET  /api/sessions/{id}/rounds/{n}/items?filter=&sort=&dir=&search=&trim=&epsilon=
//   GET  /api/sessions/{id}/rounds/{n}/sweep?epsilons=0.6,0.8
//   GET  /api/sessions/{id}/compare?a=1&b=2&epsilon=E
//
// Errors: {"error": {"status", "message", "diagnostics": [{sheet,row,column,message}]}}
// with 400 (invalid sheet), 404 (unknown session/round), 409 (round state
// conflict), 422 (bad query parameter).
//

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "tfld/session_store.hpp"

namespace httplib {
class Server;
}

namespace tfld {

class Service {
 public:
  explicit Service(std::filesystem::path session_root);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void register_routes(httplib::Server& server);

  const std::filesystem::path& session_root() const noexcept { return root_; }

 private:
  struct Session;

  std::shared_ptr<Session> find_session(const std::string& id);
  std::shared_ptr<Session> create_session(bool has_header);

  std::filesystem::path root_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path session_root = "sessions";
  std::filesystem::path static_dir;  // optional dashboard assets
};

// Blocks until the server stops.
int run_server(const ServerOptions& options);

}  // namespace tfld
