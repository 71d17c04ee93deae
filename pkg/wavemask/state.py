from collections import OrderedDict


class State(OrderedDict):
    """ Dictionary whose keys can also be read and written as attributes. Used to carry the
    options of the trainers and of the metric suite, which are built by merging the
    configured defaults with the user choices.
    """

    def __getattr__(self, name):
        if name in ["_OrderedDict__root", "_OrderedDict__map"]:
            return OrderedDict.__getattribute__(self, name)

        if name in self:
            return self[name]
        else:
            raise KeyError("The state object does not have an entry for the key '%s'." % (name,))

    def __setattr__(self, name, value):
        if name in ["_OrderedDict__root", "_OrderedDict__map", "_OrderedDict__hardroot"]:
            return OrderedDict.__setattr__(self, name, value)

        self[name] = value


def merge_dicts(*dict_args) -> State:
    """
    Given any number of dicts, shallow copy and merge into a new State,
    precedence goes to key value pairs in latter dicts. None values in later dicts do
    not override earlier ones.
    """
    result = State()
    for dictionary in dict_args:
        if dictionary is None:
            continue
        result.update({k: v for k, v in dictionary.items() if v is not None})
    return result
