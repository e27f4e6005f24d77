#pragma once

namespace fwdaffine {

// Every data-parallel kernel has an OpenMP version and a serial reference.
// Both write per-item results and reduce them in index order, so they agree bitwise.
enum class Execution { serial, parallel };

// Caps OpenMP worker count; n <= 0 leaves the runtime default.
void set_thread_count(int n);
int thread_count();

}  // namespace fwdaffine
