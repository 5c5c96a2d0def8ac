#include "rkl/rkl.hpp"
#include <cstdio>
int main(){ std::puts(rkl::version); return 0; }
