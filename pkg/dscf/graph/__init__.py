from dscf.graph.social import SocialGraph, build_graph
from dscf.graph.walks import Node2VecPolicy, TransitionPolicy, UniformPolicy, dump_walk_corpus, random_walk
