#pragma once

#include "schurtrace/errors.hpp"
#include "schurtrace/tolerances.hpp"
#include "schurtrace/types.hpp"
#include "schurtrace/bipartite.hpp"
#include "schurtrace/majorization.hpp"
#include "schurtrace/functionals.hpp"
#include "schurtrace/spectral_bounds.hpp"
#include "schurtrace/counterexample.hpp"
#include "schurtrace/qp.hpp"
#include "schurtrace/campaign.hpp"
#include "schurtrace/showcase.hpp"
#include "schurtrace/io.hpp"
