import matplotlib.pyplot as plt


def plot_train_log(log, path=None, ax=None):
    """ Plots the per-step training loss of a TrainLog, with the evaluation losses before
    and after training as horizontal lines.

    :param log: the TrainLog
    :param path: if given, the figure is saved there and closed
    :param ax: axes to draw on; a new figure is created otherwise
    :return: the axes
    """
    if ax is None:
        fig, ax = plt.subplots(figsize=(6, 4))
    else:
        fig = ax.figure

    ax.plot(log.steps, log.totals, lw=0.8, label="training loss")
    if log.initial_eval is not None:
        ax.axhline(log.initial_eval.total, ls="--", c="grey", label="initial eval")
    if log.final_eval is not None:
        ax.axhline(log.final_eval.total, ls="--", c="k", label="final eval")
    ax.set_yscale("log")
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.set_title(f"{log.mode} training")
    ax.legend()

    if path is not None:
        fig.savefig(path)
        plt.close(fig)
    return ax
