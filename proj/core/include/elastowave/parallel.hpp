#pragma once

namespace elastowave {

/// Worker count used by element loops; 1 when built without OpenMP.
int thread_count();
/// n <= 0 restores the runtime default.
void set_thread_count(int n);

}  // namespace elastowave
