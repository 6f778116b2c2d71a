#include "synthetic.hpp"
